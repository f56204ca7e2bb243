/** Email-body sanitization for the viewing pane.
 *
 * Default rendering is escaped plain text. The raw-HTML toggle runs the
 * body through sanitizeHtml, which removes script/style subtrees, event
 * handlers, javascript: URLs, and anything that would load remote content
 * (img/iframe/object/link and friends), keeping only inert formatting.
 */

const DROP_ENTIRELY = new Set([
  "script",
  "style",
  "iframe",
  "object",
  "embed",
  "applet",
  "link",
  "meta",
  "base",
  "form",
  "input",
  "button",
  "video",
  "audio",
  "source",
  "img",
  "svg",
  "math",
  "template",
]);

const URL_ATTRS = new Set(["href", "src", "background", "action", "formaction"]);

export function escapeText(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

function scrubElement(el: Element): void {
  for (const attr of Array.from(el.attributes)) {
    const name = attr.name.toLowerCase();
    if (name.startsWith("on")) {
      el.removeAttribute(attr.name);
      continue;
    }
    if (URL_ATTRS.has(name)) {
      const value = attr.value.trim().toLowerCase();
      if (el.tagName.toLowerCase() === "a" && name === "href") {
        if (value.startsWith("javascript:") || value.startsWith("data:")) {
          el.removeAttribute(attr.name);
        } else {
          // keep the target visible but inert
          el.setAttribute("data-href", attr.value);
          el.removeAttribute("href");
        }
      } else {
        el.removeAttribute(attr.name);
      }
    }
  }
}

/** Returns a detached, sanitized DOM node for the HTML body. */
export function sanitizeHtml(html: string, doc: Document): HTMLElement {
  const template = doc.createElement("template");
  template.innerHTML = html;
  const container = doc.createElement("div");
  container.className = "email-html";
  const walk = (node: Node): void => {
    for (const child of Array.from(node.childNodes)) {
      if (child.nodeType === 1) {
        const el = child as Element;
        if (DROP_ENTIRELY.has(el.tagName.toLowerCase())) {
          el.remove();
          continue;
        }
        scrubElement(el);
        walk(el);
      }
    }
  };
  walk(template.content);
  container.append(template.content.cloneNode(true));
  return container;
}

/** True when a rendered subtree contains anything executable or
 * remote-loading; the view tests audit with this after every render. */
export function auditClean(root: Element): boolean {
  for (const tag of DROP_ENTIRELY) {
    if (root.querySelector(tag)) return false;
  }
  for (const el of Array.from(root.querySelectorAll("*"))) {
    for (const attr of Array.from(el.attributes)) {
      const name = attr.name.toLowerCase();
      if (name.startsWith("on")) return false;
      if (URL_ATTRS.has(name)) return false;
    }
  }
  return true;
}
