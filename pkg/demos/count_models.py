"""Count small models of a suite, with and without pruning."""

from roughreason.suites import EnumerationTask, enumerate_models

for task in (EnumerationTask(2, "rcqo"), EnumerationTask(3, "rcqo"),
             EnumerationTask(3, "strong-negation", free=("n",))):
    pruned = enumerate_models(task, prune=True)
    naive = enumerate_models(task, prune=False)
    print(f"{task.suite} size {task.size}: {pruned.count} models "
          f"({pruned.nodes} nodes pruned, {naive.nodes} naive)")
