"""phishcode: phishing-email corpus coding, clustering, and guidance."""

__version__ = "0.1.0"
