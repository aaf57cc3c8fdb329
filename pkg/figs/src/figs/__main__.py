"""Render the stock figures: python -m figs [out_dir]."""

import sys

from figs import default_specs, gain_spec, render


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out_dir = argv[0] if argv else "."
    for spec in (*default_specs(out_dir), gain_spec(out_dir)):
        result = render(spec)
        print(f"wrote {result.paths[0]} and {result.paths[1]} "
              f"({len(result.series)} series)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
