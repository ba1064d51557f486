"""copytrace: whole-file copy-based reuse mining over git repository corpora."""

__version__ = "0.1.0"
