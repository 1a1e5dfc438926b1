"""Tabulate P_(m), its three factors and the extrapolated limit for one lambda as CSV.

usage: python3 scripts/approx_table.py --lambda 2 --m 10,20,40,80 [--precision extended]
"""

import argparse
import csv
import sys

from irrper.cli import parse_m_list
from irrper.curve import critical_data
from irrper.numeric import get_context, parse_complex
from irrper.period import approx_sequence, closed_form_P, engine_limit_P, exceptional_pipeline


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda", dest="lam", required=True)
    ap.add_argument("--m", default="20,25,30,35,40,50,60,70,80")
    ap.add_argument("--precision", default="extended", choices=("double", "extended"))
    args = ap.parse_args(argv)
    ctx = get_context(args.precision)
    cd = critical_data(parse_complex(args.lam), ctx)
    ms = parse_m_list(args.m)
    if cd.exceptional:
        out = exceptional_pipeline(cd, ms)
        recs, ext, refs = out["records"], out["extrapolation"], {"gamma_product": out["target"]}
    else:
        recs, ext = approx_sequence(cd, ms)
        refs = {"printed_limit": closed_form_P(cd), "derived_limit": engine_limit_P(cd)}
    w = csv.writer(sys.stdout, lineterminator="\n")
    keys = sorted(recs[0].factors)
    w.writerow(["m", "P_re", "P_im"] + [f"{k}_abs" for k in keys])
    for r in recs:
        p = complex(r.P)
        w.writerow([r.m, repr(p.real), repr(p.imag)] + [repr(abs(complex(r.factors[k]))) for k in keys])
    lim = complex(ext.limit)
    w.writerow(["limit", repr(lim.real), repr(lim.imag), f"error={ext.error:.3g}", f"m0={ext.m0}"])
    for name, v in refs.items():
        v = complex(v)
        w.writerow([name, repr(v.real), repr(v.imag)])
    return 0


if __name__ == "__main__":
    sys.exit(main())
