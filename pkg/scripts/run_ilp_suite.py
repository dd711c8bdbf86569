"""Solve every built-in ILP task and print the extracted programs.

`sort` is attempted but not expected to succeed within the default budget;
pass task names as arguments to restrict the sweep.
"""

import sys

from nln.ilp_core import TrainConfig, train_ilp
from nln.ilp_tasks import BUILTIN_TASKS, get_task


def main():
    names = sys.argv[1:] or sorted(BUILTIN_TASKS)
    solved = 0
    for name in names:
        task = get_task(name)
        result = train_ilp(task, TrainConfig(seed=0))
        solved += result.success
        print(f"{name}: success={result.success} loss={result.loss:.6f} "
              f"steps={result.steps} restarts={result.restarts_used}")
        if result.success:
            for line in str(result.program).splitlines():
                print(f"    {line}")
    print(f"solved {solved}/{len(names)}")


if __name__ == "__main__":
    main()
