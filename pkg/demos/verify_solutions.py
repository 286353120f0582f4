"""Check the bundled student solutions step by step and print their defect ledgers."""

from roughreason.rough import sample_corpus
from roughreason.verifier import ledger_markdown

corpus = sample_corpus()
print(ledger_markdown(corpus.ledgers))

for lg in corpus.ledgers:
    if lg.verifiable and lg.flagged():
        steps = ", ".join(str(i) for i in lg.flagged())
        print(f"{lg.solution}: flagged steps {steps}, total severity {lg.total_severity}")
