"""In-process registry of background campaign jobs.

Jobs run on daemon threads inside the service process; the campaign
runner's own resumability makes a job killed mid-flight safe to resubmit.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional


@dataclass
class Job:
    job_id: str
    name: str
    state: str = "queued"  # queued | running | done | failed
    done: int = 0
    total: int = 0
    error: Optional[str] = None
    csv_path: Optional[str] = None
    manifest_path: Optional[str] = None
    extra_paths: dict = field(default_factory=dict)


class JobStore:
    def __init__(self):
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)

    def submit(self, name: str, total: int, work: Callable[[Job], None]) -> Job:
        with self._lock:
            job = Job(job_id=f"job-{next(self._counter)}", name=name, total=total)
            self._jobs[job.job_id] = job

        def runner():
            job.state = "running"
            try:
                work(job)
                job.state = "done"
            except Exception as exc:  # surfaced through the API, not the server log
                job.error = f"{type(exc).__name__}: {exc}"
                job.state = "failed"

        threading.Thread(target=runner, daemon=True).start()
        return job

    def get(self, job_id: str) -> Optional[Job]:
        with self._lock:
            return self._jobs.get(job_id)

    def all(self) -> list[Job]:
        with self._lock:
            return list(self._jobs.values())
