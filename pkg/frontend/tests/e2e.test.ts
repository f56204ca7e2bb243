/**
 * End-to-end workbench flow against a real annotation service instance:
 * two coders annotate the same five emails through the exact client/form
 * code the UI uses, the agreement panel model shows the worked 0.62/0.64
 * kappa/alpha row, and the service export round-trips through the batch
 * `irr` command with identical values.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { agreementTable } from "../src/agreement.js";
import { ApiClient } from "../src/api.js";
import { formFromSuggestion, setField, toPayload } from "../src/form.js";
import type { AgreementPayload, SchemaPayload } from "../src/types.js";

const PYTHON = process.env.PYTHON ?? "python3";
const REPO_ROOT = resolve(__dirname, "..", "..");
const MBOX = join(REPO_ROOT, "tests", "data", "labeled_50.mbox");
const PORT = 21000 + (process.pid % 8000);
const BASE = `http://127.0.0.1:${PORT}`;

const CODERS = { alice: "token-a", bob: "token-b" };

// the worked agreement example: per-email threat labels for each coder
const THREAT_A = ["threat", "threat", "none", "none", "threat"];
const THREAT_B = ["threat", "none", "none", "none", "threat"];

let service: ChildProcess | null = null;
let workdir: string;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const res = await fetch(`${BASE}/api/schema`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("annotation service did not come up");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "workbench-e2e-"));
  const ingest = spawnSync(
    PYTHON,
    ["-m", "phishcode.cli", "ingest", "--input", MBOX, "--out", workdir],
    { encoding: "utf-8" },
  );
  expect(ingest.status, ingest.stderr).toBe(0);

  service = spawn(
    PYTHON,
    [
      "-m", "phishcode.cli", "serve",
      "--store", join(workdir, "journal.jsonl"),
      "--emails", join(workdir, "records.jsonl"),
      "--coder", "alice=token-a",
      "--coder", "bob=token-b",
      "--port", String(PORT),
      "--recipient-name", "Jose",
      "--recipient-email", "jose@monkey.org",
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  service.stderr?.on("data", (chunk) => {
    const text = String(chunk);
    if (text.includes("Traceback")) console.error(text);
  });
  await waitForService();
});

afterAll(() => {
  service?.kill();
});

async function annotateFive(coder: keyof typeof CODERS, threatLabels: string[]): Promise<string[]> {
  const client = new ApiClient(BASE, coder, CODERS[coder]);
  const schema: SchemaPayload = await client.getSchema();
  const annotated: string[] = [];
  for (const threat of threatLabels) {
    const next = await client.nextEmail();
    expect(next.done).toBe(false);
    let form = formFromSuggestion(next.suggestion!, schema);
    form = setField(form, "threat", threat, schema);
    const result = await client.submitAnnotation(toPayload(form));
    expect(result.stored).toBe(true);
    annotated.push(next.email!.id);
  }
  return annotated;
}

describe("workbench end to end", () => {
  it("two coders annotate five emails and the agreement panel shows 0.62/0.64", async () => {
    const idsA = await annotateFive("alice", THREAT_A);
    const idsB = await annotateFive("bob", THREAT_B);
    expect(idsA).toEqual(idsB); // both walked the same queue

    const client = new ApiClient(BASE, "alice", CODERS.alice);
    const payload: AgreementPayload = await client.agreement("alice", "bob");
    expect(payload.empty).toBe(false);

    const table = agreementTable(payload);
    const threatRow = table.rows.find((r) => r.code === "Threatening Language");
    expect(threatRow).toBeDefined();
    expect(threatRow!.kappa).toBe("0.62");
    expect(threatRow!.alpha).toBe("0.64");
    expect(threatRow!.items).toBe(5);

    // every other code came straight from the shared suggestion
    for (const row of table.rows) {
      if (row.code !== "Threatening Language") {
        expect(row.kappa).toBe("1.00");
      }
    }

    // the sequences differ at one position; the disagreement list shows it
    const cells = await client.disagreements("alice", "bob");
    const threatCells = cells.disagreements.filter((c) => c.code === "threat");
    expect(threatCells.map((c) => c.email_id)).toEqual([idsA[1]]);
    expect(threatCells[0].a).toBe("threat");
    expect(threatCells[0].b).toBe("none");
  }, 90_000);

  it("export round-trips through the batch irr command with identical values", async () => {
    const client = new ApiClient(BASE, "alice", CODERS.alice);
    const exportA = await client.exportAnnotations("jsonl", "alice");
    const exportB = await client.exportAnnotations("jsonl", "bob");
    const fileA = join(workdir, "alice.jsonl");
    const fileB = join(workdir, "bob.jsonl");
    writeFileSync(fileA, exportA);
    writeFileSync(fileB, exportB);

    const irrOut = join(workdir, "irr");
    const irr = spawnSync(
      PYTHON,
      ["-m", "phishcode.cli", "irr", fileA, fileB, "--out", irrOut],
      { encoding: "utf-8" },
    );
    expect(irr.status, irr.stderr).toBe(0);

    const batch = JSON.parse(readFileSync(join(irrOut, "agreement.json"), "utf-8"));
    const live: AgreementPayload = await client.agreement("alice", "bob");

    expect(batch.overall_kappa).toBe(live.overall_kappa);
    expect(batch.overall_alpha).toBe(live.overall_alpha);
    for (const [code, liveValues] of Object.entries(live.per_code!)) {
      const batchValues = batch.per_code[code];
      expect(batchValues.kappa, code).toBe(liveValues.kappa);
      expect(batchValues.alpha, code).toBe(liveValues.alpha);
      expect(batchValues.p_o, code).toBe(liveValues.p_o);
      expect(batchValues.n_items, code).toBe(liveValues.n_items);
    }
  }, 90_000);
});
