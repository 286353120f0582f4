"""Classify small structures against the axiom suites, including a counterexample."""

from pathlib import Path

from roughreason.partial import read_structure
from roughreason.rough import induced_structure, sample_corpus
from roughreason.suites import classify_structure, pawlak_structure, run_suite

pawlak = pawlak_structure([1, 2, 3], [[1, 2], [3]])
for name, verdict in classify_structure(pawlak).items():
    print(f"pawlak {name:20s} {verdict.value}")

fixture = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "chain3_nonmonotone_lower.json"
report = run_suite(read_structure(fixture), "rcqo")
for failure in report.failures():
    print(f"3-chain fails {failure.name} at {failure.witness}")

induced = induced_structure(sample_corpus().space())
print("corpus structure, er-companion:", run_suite(induced, "er-companion").verdict.value)
