# sweep_worker.py

import logging
import threading

from PySide6.QtCore import QObject, QRunnable, QThreadPool, Qt, Signal, Slot

logger = logging.getLogger(__name__)


class SweepSignals(QObject):
    """Signals available from a running sweep job."""

    finished = Signal(object)  # Emits the job's list of result records
    error = Signal(str, str)  # Emits the job label and a one-line error message


class SweepJob(QRunnable):
    """Runs one (image, Q, scheme) point of the sweep on the thread pool."""

    def __init__(self, key, fn, *args):
        super().__init__()
        self.key = key
        self.fn = fn
        self.args = args
        self.signals = SweepSignals()
        # the sink reads signals after run() returns
        self.setAutoDelete(False)

    @property
    def label(self) -> str:
        return ":".join(str(part) for part in self.key)

    @Slot()
    def run(self):
        try:
            result = self.fn(*self.args)
            self.signals.finished.emit(result)
        except Exception as e:
            logger.error("job %s failed: %s: %s", self.label, type(e).__name__, e)
            self.signals.error.emit(self.label, f"{type(e).__name__}: {e}")


class ResultSink:
    """
    Collects job output from worker threads. Records are sorted by their
    sort_key before anyone reads them, so the order never depends on which
    thread finished first.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._records = []
        self._failures = []

    def add(self, records) -> None:
        with self._lock:
            self._records.extend(records)

    def fail(self, label: str, message: str) -> None:
        with self._lock:
            self._failures.append((label, message))

    def records(self) -> list:
        with self._lock:
            return sorted(self._records, key=lambda r: r.sort_key)

    def failures(self) -> list[tuple[str, str]]:
        with self._lock:
            return sorted(self._failures)


def run_jobs(jobs: list[SweepJob], workers: int = 0) -> ResultSink:
    """Starts every job on a private pool and blocks until all have reported."""
    sink = ResultSink()
    pool = QThreadPool()
    if workers > 0:
        pool.setMaxThreadCount(workers)
    logger.debug("running %d job(s) on %d thread(s)", len(jobs), pool.maxThreadCount())
    for job in jobs:
        job.signals.finished.connect(sink.add, Qt.ConnectionType.DirectConnection)
        job.signals.error.connect(sink.fail, Qt.ConnectionType.DirectConnection)
        pool.start(job)
    pool.waitForDone()
    return sink
