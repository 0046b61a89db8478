"""Command-line interface.

Exit status: 0 success, 1 runtime failure, 2 usage or validation error.
Errors are reported on stderr as a single ``error: <message>`` line.
"""

from __future__ import annotations

import argparse
import math
import os
import random
import secrets
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import attacks, cipher, imgio, indexgen, metrics, nist, qkr, wheel
from .errors import (
    DimensionMismatchError, InvalidKeyError, PGMError, SequenceTooShortError, SidecarError,
)

KEY_ENV = "QWHEEL_KEY"
# 250 x 500 bytes = 10^6 bits for the randomness streams
STREAM_SHAPE = (250, 500)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# shared option handling

def _read_key(args) -> wheel.SecretKey:
    text = None
    if getattr(args, "key", None) is not None:
        text = args.key
    elif getattr(args, "key_file", None) is not None:
        text = Path(args.key_file).read_text(encoding="ascii", errors="replace").rstrip("\r\n")
    elif os.environ.get(KEY_ENV):
        text = os.environ[KEY_ENV]
    if text is None:
        raise InvalidKeyError("key: expected 32 printable ASCII characters")
    return wheel.SecretKey(text)


def _config(args, need_key: bool = True) -> cipher.CipherConfig:
    key = _read_key(args) if need_key else wheel.SecretKey(cipher.DEFAULT_KEY)
    rotor = qkr.RotorParams(kick_strength=args.kick_strength, grid_size=args.grid)
    ab = cipher.Ablation.from_labels(args.ablation or [], seed=args.seed)
    return cipher.CipherConfig(key=key, rotor=rotor, ablation=ab)


def _add_key(p):
    g = p.add_argument_group("key (first found wins: --key, --key-file, $" + KEY_ENV + ")")
    g.add_argument("--key", help="32 printable ASCII characters")
    g.add_argument("--key-file", help="file whose first line is the key")


def _add_pipeline(p):
    _add_key(p)
    p.add_argument("--kick-strength", type=float, default=5.0, metavar="K")
    p.add_argument("--grid", type=int, default=2048, help="momentum grid size (power of two)")
    p.add_argument("--ablation", action="append", choices=["A1", "A2", "A3", "A4"],
                   help="disable one stage; repeatable")
    p.add_argument("--seed", type=int, default=215, help="seed for the A2 fallback sequence")


def _add_format(p):
    p.add_argument("--format", choices=["text", "csv"], default="text")


def _emit(text: str, out_path=None):
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands

def cmd_keygen(args) -> int:
    rng = random.Random(args.seed) if args.seed is not None else secrets.SystemRandom()
    print("".join(chr(rng.randint(32, 126)) for _ in range(wheel.KEY_LENGTH)))
    return 0


def cmd_validate(args) -> int:
    key = _read_key(args)
    t = wheel.derive_taps(key)
    print(f"ok x0={t.x0} y0={t.y0} z0={t.z0} w0={t.w0} delta={t.delta}")
    return 0


def _tables_for(args, cfg, shape):
    if args.sidecar and args.command == "decrypt":
        P, plan = indexgen.read_sidecar(Path(args.sidecar).read_bytes())
        if plan.shape != shape:
            raise DimensionMismatchError(f"sidecar plan is {plan.shape}, image is {shape}")
        return P, plan
    return cipher.tables(cfg, *shape)


def cmd_encrypt(args) -> int:
    cfg = _config(args)
    img = imgio.load(args.input)
    P, plan = _tables_for(args, cfg, img.shape)
    ct, P, plan = cipher.encrypt(img, cfg, (P, plan))
    imgio.save(args.output, ct)
    if args.sidecar:
        Path(args.sidecar).write_bytes(indexgen.write_sidecar(P, plan))
    return 0


def cmd_decrypt(args) -> int:
    cfg = _config(args)
    ct = imgio.load(args.input)
    tabs = _tables_for(args, cfg, ct.shape)
    imgio.save(args.output, cipher.decrypt(ct, cfg, tabs))
    return 0


def cmd_analyze(args) -> int:
    ref = imgio.load(args.reference) if args.reference else None
    reports = [(p, metrics.report(imgio.load(p), ref)) for p in args.images]
    if args.format == "csv":
        lines = ["image," + metrics.MetricsReport.csv_header()]
        lines += [f"{p},{r.csv_row()}" for p, r in reports]
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit("".join(f"[{p}]\n{r.to_text()}" for p, r in reports), args.output)
    if args.histogram:
        Path(args.histogram).write_text(metrics.histogram_csv(imgio.load(args.images[0])))
    return 0


def _energy_stream(cfg, nbytes):
    seq = qkr.generate_energy_sequence(replace(cfg.rotor, num_kicks=nbytes))
    return seq, indexgen.energies_to_indices(seq, 256).astype(np.uint8)


def _wheel_stream(cfg):
    P, plan = cipher.tables(cfg, *STREAM_SHAPE)
    return cipher.keystream(cfg, P, plan).ravel()


def _file_stream(path):
    data = Path(path).read_bytes()
    try:
        return imgio.read_pgm(data).ravel()
    except PGMError:
        return np.frombuffer(data, dtype=np.uint8)


def cmd_randtest(args) -> int:
    need_key = args.source == "wheel"
    cfg = _config(args, need_key=need_key)
    nbytes = args.bits // 8
    extra = []
    if args.source == "energy":
        seq, stream = _energy_stream(cfg, max(nbytes, 2))
        extra.append(("lag1_autocorrelation", qkr.lag1_autocorrelation(seq[:args.lag_window])))
        extra.append(("time_correlation", qkr.time_correlation(seq[:args.lag_window])))
        if args.dump_energy:
            Path(args.dump_energy).write_text(
                "t,E\n" + "".join(f"{t},{float(e)!r}\n" for t, e in enumerate(seq, start=1)))
    elif args.source == "wheel":
        stream = _wheel_stream(cfg)
    else:
        if not args.path:
            raise UsageError("--source file needs --path")
        stream = _file_stream(args.path)
    stream = stream[:nbytes] if nbytes else stream
    if len(stream) == 0:
        raise UsageError("empty stream")
    results = nist.run_suite(nist.bytes_to_bits(stream))
    if args.format == "csv":
        text = nist.results_csv(results)
        text += "".join(f"{k},{v!r},\n" for k, v in extra)
    else:
        text = f"source={args.source} bits={8 * len(stream)}\n" + nist.format_table(results)
        text += "".join(f"{k}={v:.6f}\n" for k, v in extra)
    _emit(text, args.output)
    return 0


def cmd_attack(args) -> int:
    cfg = _config(args)
    img = imgio.load(args.input)
    sweep = []
    for lab, spec in attacks.SWEEP:
        if spec.kind == "crop" and spec.amount > min(img.shape):
            print(f"note: {lab} skipped, crop {int(spec.amount)} exceeds image", file=sys.stderr)
            continue
        sweep.append((lab, replace(spec, noise_seed=args.noise_seed)))
    rows = attacks.tamper_sweep(img, cfg, attacks=sweep)
    if args.format == "csv":
        _emit(attacks.sweep_csv(rows), args.output)
    else:
        head = f"{'label':<9}" + "".join(f"{c:>14}" for c in attacks.SWEEP_COLUMNS[1:])
        body = [f"{r.label:<9}" + "".join(f"{v:>14.4f}" for v in r.values()[1:]) for r in rows]
        _emit("\n".join([head] + body) + "\n", args.output)
    return 0


def cmd_keyspace(args) -> int:
    size = 95**wheel.KEY_LENGTH
    exp = len(str(size)) - 1
    print(f"keyspace={size}")
    print(f"magnitude={size / 10**exp:.2f} x 10^{exp}")
    print(f"log10={wheel.KEY_LENGTH * math.log10(95):.4f}")
    return 0


def _max_corr(stream, shape):
    img = np.asarray(stream, dtype=np.uint8).reshape(shape)
    vals = []
    for d in metrics.DIRECTIONS:
        try:
            vals.append(abs(metrics.adjacent_correlation(img, d)))
        except Exception:
            vals.append(1.0)  # constant stream: fully predictable
    return max(vals)


def cmd_ablation(args) -> int:
    base = _config(args)
    img = imgio.load(args.input)
    M, N = img.shape
    side = min(args.crop, M, N)
    variants = [("full", cipher.Ablation())] + [
        (lab, cipher.Ablation.from_labels([lab], seed=args.seed)) for lab in ("A1", "A2", "A3", "A4")
    ]
    rows = []
    for label, ab in variants:
        cfg = replace(base, ablation=ab)
        ct, P, plan = cipher.encrypt(img, cfg)
        raw = cipher.raw_wheel_stream(cfg, P, M * N)
        hit = attacks.apply_attack(ct, attacks.AttackSpec("crop", side))
        dec = cipher.decrypt(hit, cfg, (P, plan))
        rows.append((label, metrics.entropy(ct), metrics.histogram_chi2(ct)[1],
                     _max_corr(raw, (M, N)), metrics.npcr(img, ct),
                     attacks.damage_locality(img, dec, side)))
    cols = ("variant", "entropy", "chi_square", "wheel_max_corr", "npcr", "crop_locality")
    if args.format == "csv":
        lines = [",".join(cols)] + [",".join([r[0]] + [f"{v:.6f}" for v in r[1:]]) for r in rows]
    else:
        lines = [f"{cols[0]:<8}" + "".join(f"{c:>16}" for c in cols[1:])]
        lines += [f"{r[0]:<8}" + "".join(f"{v:>16.5f}" for v in r[1:]) for r in rows]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_wheel(args) -> int:
    cfg = _config(args)
    M, N = args.rows, args.cols
    P, plan = cipher.tables(cfg, M, N)
    w = wheel.Wheel.identity() if cfg.ablation.static_wheel else wheel.shuffle_wheel(P)
    t = wheel.derive_taps(cfg.key)
    sys.stdout.write(w.dump())
    print(f"taps={t.x0},{t.y0},{t.z0},{t.w0} delta={t.delta}")
    if args.keystream:
        ks = cipher.keystream(cfg, P, plan)
        if args.keystream.endswith(".pgm"):
            imgio.save(args.keystream, ks)
        else:
            Path(args.keystream).write_bytes(ks.tobytes())
    return 0


def cmd_synth(args) -> int:
    imgio.save(args.output, imgio.synth(args.kind, args.rows, args.cols, seed=args.seed))
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qwheel", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="print a random key")
    p.add_argument("--seed", type=int, help="deterministic key (testing only)")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("validate", help="check a key and show its taps")
    _add_key(p)
    p.set_defaults(func=cmd_validate)

    for name, fn in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        p = sub.add_parser(name, help=f"{name} a PGM image")
        p.add_argument("input")
        p.add_argument("output")
        _add_pipeline(p)
        p.add_argument("--sidecar", help="QWP1 file with P and the plan (written by encrypt, "
                                         "read by decrypt instead of rerunning the rotor)")
        p.set_defaults(func=fn)

    p = sub.add_parser("analyze", help="image metrics")
    p.add_argument("images", nargs="+")
    p.add_argument("--reference", help="plaintext to compare each image against")
    p.add_argument("--histogram", help="write value,count CSV of the first image")
    p.add_argument("-o", "--output")
    _add_format(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("randtest", help="NIST subset on a byte stream")
    p.add_argument("--source", choices=["energy", "wheel", "file"], default="wheel")
    p.add_argument("--path", help="input file for --source file (PGM payload or raw bytes)")
    p.add_argument("--bits", type=int, default=1_000_000, help="stream length; 0 = whole file")
    p.add_argument("--lag-window", type=int, default=5000, help="energies used for lag-1")
    p.add_argument("--dump-energy", help="write t,E CSV of the energy sequence")
    p.add_argument("-o", "--output")
    _add_pipeline(p)
    _add_format(p)
    p.set_defaults(func=cmd_randtest)

    p = sub.add_parser("attack", help="crop/noise tampering sweep")
    p.add_argument("input")
    p.add_argument("--noise-seed", type=int, default=attacks.DEFAULT_NOISE_SEED)
    p.add_argument("-o", "--output")
    _add_pipeline(p)
    _add_format(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("keyspace", help="size of the key space")
    p.set_defaults(func=cmd_keyspace)

    p = sub.add_parser("ablation", help="compare the full scheme with A1..A4")
    p.add_argument("input")
    p.add_argument("--crop", type=int, default=40, help="crop side for the locality check")
    p.add_argument("-o", "--output")
    _add_pipeline(p)
    _add_format(p)
    p.set_defaults(func=cmd_ablation)

    p = sub.add_parser("wheel", help="dump the shuffled wheel and taps")
    p.add_argument("--rows", type=int, default=256)
    p.add_argument("--cols", type=int, default=256)
    p.add_argument("--keystream", help="also write the keystream (.pgm or raw bytes)")
    _add_pipeline(p)
    p.set_defaults(func=cmd_wheel)

    p = sub.add_parser("synth", help="write a synthetic test image")
    p.add_argument("kind", choices=imgio.SYNTH_KINDS)
    p.add_argument("output")
    p.add_argument("--rows", type=int, default=256)
    p.add_argument("--cols", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return ap


_USAGE_ERRORS = (UsageError, InvalidKeyError, PGMError, DimensionMismatchError, SidecarError,
                 ValueError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SequenceTooShortError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # runtime failures: I/O, truncation guard, ...
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
