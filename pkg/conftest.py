"""Collect the script-style test files (module-level checks ending in
sys.exit) as one pytest item each, run in a subprocess."""
import subprocess
import sys

import pytest


def pytest_collect_file(parent, file_path):
    if file_path.suffix == '.py' and file_path.name.startswith('test_'):
        return ScriptFile.from_parent(parent, path=file_path)


def pytest_pycollect_makemodule(module_path, parent):
    # Importing these files would execute them and raise SystemExit.
    return _Skip.from_parent(parent, path=module_path)


class _Skip(pytest.File):
    def collect(self):
        return []


class ScriptFile(pytest.File):
    def collect(self):
        yield ScriptItem.from_parent(self, name=self.path.name)


class ScriptItem(pytest.Item):
    def runtest(self):
        proc = subprocess.run([sys.executable, str(self.path)], cwd=str(self.path.parent),
                              capture_output=True, text=True)
        if proc.returncode != 0:
            raise ScriptFailure(proc)

    def repr_failure(self, excinfo):
        if isinstance(excinfo.value, ScriptFailure):
            p = excinfo.value.proc
            return f'exit code {p.returncode}\n{p.stdout[-4000:]}\n{p.stderr[-4000:]}'
        return super().repr_failure(excinfo)

    def reportinfo(self):
        return self.path, 0, self.name


class ScriptFailure(Exception):
    def __init__(self, proc):
        super().__init__(proc.returncode)
        self.proc = proc
