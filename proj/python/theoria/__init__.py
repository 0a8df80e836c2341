"""Python interface to the theoria proof kernel."""

import json as _json
import os

from ._core import KernelError, Workspace, default_step_budget, format_formula
from ._core import Service as _Service
from ._core import check as _check
from ._core import prove as _prove

__all__ = [
    "KernelError",
    "Service",
    "Workspace",
    "check",
    "default_step_budget",
    "format_formula",
    "prove",
    "prove_obligation",
]


def check(paths, root=""):
    """Check theory files. Returns (exit_code, stdout, stderr)."""
    if isinstance(paths, (str, os.PathLike)):
        paths = [paths]
    return _check([str(p) for p in paths], str(root))


def prove(files, root="", auto=True, replay=False, order="expand,rewrite,inference", budget=None):
    """Prove every obligation of the given .seq files.

    Returns (exit_code, report) where report is the decoded JSON report.
    """
    if isinstance(files, (str, os.PathLike)):
        files = [files]
    code, out, err = _prove([str(f) for f in files], str(root), auto, replay, order, budget)
    report = _json.loads(out) if out.strip() else {"pos": []}
    if err:
        report["errors"] = err
    return code, report


def prove_obligation(workspace, po, auto=True, replay=False, order="expand,rewrite,inference", budget=None):
    """Prove one obligation of a Workspace; returns the outcome as a dict."""
    return _json.loads(workspace.prove_json(po, auto, replay, order, budget))


class Service:
    """The JSON API behind `theoria serve`, without the HTTP transport."""

    def __init__(self, root):
        self._service = _Service(str(root))

    def request(self, method, path, body=None):
        payload = "" if body is None else _json.dumps(body)
        status, text = self._service.handle(method, path, payload)
        return status, _json.loads(text)

    def get(self, path):
        return self.request("GET", path)

    def post(self, path, body=None):
        return self.request("POST", path, {} if body is None else body)
