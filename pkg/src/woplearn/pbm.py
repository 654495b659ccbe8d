"""Plain PBM (P1) reading and writing; 1 is foreground.

Only the ASCII variant is supported: magic "P1", whitespace-separated
width and height, then 0/1 tokens.  '#' starts a comment that runs to the
end of its line.  The boundary policy is not stored in the file; callers
attach it when loading.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .morphology import ZERO_PAD, BinaryImage


def _tokens_with_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for tok in body.split():
            yield tok, lineno


def parse_pbm(text: str, boundary: str = ZERO_PAD) -> BinaryImage:
    stream = _tokens_with_lines(text)
    try:
        magic, lineno = next(stream)
    except StopIteration:
        raise ParseError("empty PBM file", line=1) from None
    if magic != "P1":
        raise ParseError(f"unsupported magic {magic!r}, only plain P1 is accepted", line=lineno)
    dims = []
    for _ in range(2):
        try:
            tok, lineno = next(stream)
        except StopIteration:
            raise ParseError("missing image dimensions", line=lineno) from None
        if not tok.isdigit():
            raise ParseError(f"bad dimension token {tok!r}", line=lineno)
        dims.append(int(tok))
    width, height = dims
    if width < 1 or height < 1:
        raise ParseError(f"dimensions must be positive, got {width}x{height}", line=lineno)
    bits = np.zeros(height * width, dtype=bool)
    for i in range(height * width):
        try:
            tok, lineno = next(stream)
        except StopIteration:
            raise ParseError(
                f"expected {height * width} pixel tokens, got {i}", line=lineno
            ) from None
        if tok == "1":
            bits[i] = True
        elif tok != "0":
            raise ParseError(f"bad pixel token {tok!r}", line=lineno)
    leftover = next(stream, None)
    if leftover is not None:
        raise ParseError(f"trailing token {leftover[0]!r}", line=leftover[1])
    return BinaryImage(bits.reshape(height, width), boundary)


def read_pbm(path, boundary: str = ZERO_PAD) -> BinaryImage:
    with open(path, "r") as fh:
        return parse_pbm(fh.read(), boundary)


def render_pbm(image: BinaryImage) -> str:
    rows = [" ".join("1" if v else "0" for v in row) for row in image.pixels]
    return f"P1\n{image.width} {image.height}\n" + "\n".join(rows) + "\n"


def write_pbm(image: BinaryImage, path) -> None:
    with open(path, "w") as fh:
        fh.write(render_pbm(image))
