"""File format, random families, certification runner and CLI."""

from gfusion.tooling.certify import CaseResult, CertificationRun, emit_report, run_certification
from gfusion.tooling.generate import Profile, random_family
from gfusion.tooling.specfile import FrameSpecDocument, dump_spec, parse_spec

__all__ = [
    "CaseResult",
    "CertificationRun",
    "FrameSpecDocument",
    "Profile",
    "dump_spec",
    "emit_report",
    "parse_spec",
    "random_family",
    "run_certification",
]
