from dataclasses import astuple, dataclass

CSV_HEADER = ("bench_name", "method", "n_states", "rep", "runtime_ns")


@dataclass(frozen=True, slots=True)
class BenchRecord:
    """
    One timed repetition of one method at one problem size.
    """
    bench_name: str
    method: str
    n_states: int
    rep: int
    runtime_ns: int

    def __post_init__(self):
        if self.runtime_ns <= 0:
            raise ValueError(f"runtime_ns must be positive, got {self.runtime_ns}")
        if self.rep < 1:
            raise ValueError(f"rep counts from 1, got {self.rep}")

    @property
    def sort_key(self) -> tuple[str, str, int, int]:
        return self.bench_name, self.method, self.n_states, self.rep

    @property
    def failed(self) -> bool:
        return self.method.endswith("_failed")

    def as_row(self) -> tuple[str, str, int, int, int]:
        return astuple(self)
