# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Demo of opduality on small examples

Runs the hand-checkable anchors: the scalar characteristic projection, the P3 network
dipoles and K/L pair, the interval defect space and a free/wired exhaustion.
"""
import argparse

import numpy as np
from dotenv import load_dotenv
from loguru import logger
from tabulate import tabulate

load_dotenv('.env', override=True)


def main(args):
    from opduality import (
        OperatorBetween,
        WeightedSpace,
        char_projection,
        dipole,
        exhaustion_harmonics,
        interval_defect_model,
        kl_pair,
        make_family,
        parse_network,
    )
    from opduality.cli import BUNDLED_P3

    # 1. T = 2 on the real line
    r = WeightedSpace.euclidean(1)
    e = char_projection(OperatorBetween(2.0, r, r))
    print("Characteristic projection of T = 2:")
    print(tabulate(e.matrix, floatfmt=".6f", tablefmt="pipe"))

    # 2. P3 network
    n = parse_network(args.network or BUNDLED_P3)
    rows = [[x] + list(dipole(n, x)) for x in n.free_vertices]
    print(f"\nDipoles of '{n.name}' (base {n.base}):")
    print(tabulate(rows, headers=["x"] + list(n.vertices), floatfmt=".6f", tablefmt="pipe"))
    kl = kl_pair(n)
    for check in kl.checks:
        logger.info(f"{check.name}: residual {check.residual:.3e} ({'pass' if check.passed else 'FAIL'})")

    # 3. Interval defect space
    model = interval_defect_model(args.grid_points)
    print(f"\nDefect space of -d^2/dx^2 on (0, 1): indices {model.indices}")
    print(tabulate(model.gram, floatfmt=".8f", tablefmt="pipe"))
    print(f"closed form: (e^2 - 1)/2 = {(np.e ** 2 - 1) / 2:.8f}, (1 - e^-2)/2 = {(1 - np.e ** -2) / 2:.8f}")

    # 4. Exhaustion
    fam = make_family(args.family)
    report = exhaustion_harmonics(fam)
    print(f"\nFree/wired exhaustion of {fam.generator}:")
    print(tabulate([[r.level, r.r_free, r.r_wired, r.gap] for r in report.rows],
                   headers=["level", "R_free", "R_wired", "gap"], floatfmt=".6e", tablefmt="pipe"))


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="opduality demo",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py
  python main.py --family binary_tree:8:1
  python main.py --network my.net --grid_points 512
        """
    )
    parser.add_argument('--network', type=str, default=None, help='Network file (default: bundled P3)')
    parser.add_argument('--grid_points', type=int, default=256, help='Quadrature points of the interval model')
    parser.add_argument('--family', type=str, default='path_n', help='Exhaustion family')
    main(parser.parse_args())
