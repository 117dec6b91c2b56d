#!/usr/bin/env python
""" Runs the end to end tests against the installed wg-plate command """

import argparse
import sys
import tempfile

from wg_plate import case_names

from lib.test import check_unknown_case, perform_tests
from lib.tools import show_result, show_status


def main():
    """ Runs the tests """

    parser = argparse.ArgumentParser(description="Perform end to end tests.")
    parser.add_argument("--case", nargs="+", default=case_names(), help="Case names")
    parser.add_argument("--max-dof", type=int, default=2000, help="Free DOF budget per run")
    args = parser.parse_args()

    result = all([run_tests(case, args.max_dof) for case in args.case])

    with tempfile.TemporaryDirectory() as out:
        show_status("Testing unknown case...")
        result = show_result("no-such-case", "unknown-case", check_unknown_case(out)) and result

    show_status("PASS" if result else "FAIL", newline=True)

    sys.exit(0 if result else 1)


def run_tests(case, max_dof):
    """ Runs the tests """

    show_status("Testing case {case}".format(case=case), newline=True)
    return perform_tests(case, max_dof)


if __name__ == "__main__":
    main()
