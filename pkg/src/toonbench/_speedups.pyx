# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_kernels.py``."""

from libc.stdint cimport int64_t


def scan_lines(str text):
    cdef list out = []
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t i = 0, start, j, end, k
    cdef Py_ssize_t lineno = 0
    cdef Py_ssize_t lead
    cdef Py_UCS4 c
    cdef bint blank
    while i <= n:
        lineno += 1
        start = i
        while i < n and text[i] != u"\n":
            i += 1
        end = i
        i += 1
        j = start
        while j < end and text[j] == u" ":
            j += 1
        lead = j - start
        blank = True
        for k in range(j, end):
            c = text[k]
            if not c.isspace():
                blank = False
                break
        if blank:
            continue
        if text[j] == u"\t":
            lead = -1
        while end > j and text[end - 1] == u" ":
            end -= 1
        out.append((lineno, lead, text[j:end]))
    return out


def split_cells(str text, str delimiter):
    cdef Py_UCS4 d = delimiter[0]
    cdef list cells = []
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t i = 0, start = 0
    cdef bint in_quote = False
    cdef Py_UCS4 c
    while i < n:
        c = text[i]
        if in_quote:
            if c == u"\\":
                i += 1
            elif c == u'"':
                in_quote = False
        elif c == u'"':
            in_quote = True
        elif c == d:
            cells.append(text[start:i].strip(u" "))
            start = i + 1
        i += 1
    if in_quote:
        return None
    cells.append(text[start:].strip(u" "))
    return cells


def signed_rank_counts(list doubled_ranks):
    cdef Py_ssize_t n = len(doubled_ranks)
    cdef Py_ssize_t total = 0, reach = 0, s, r, k
    for k in range(n):
        total += <Py_ssize_t>doubled_ranks[k]
    cdef int64_t[::1] counts
    import array
    buf = array.array("q", [0]) * (total + 1)
    counts = buf
    counts[0] = 1
    for k in range(n):
        r = <Py_ssize_t>doubled_ranks[k]
        reach += r
        s = reach
        while s >= r:
            counts[s] += counts[s - r]
            s -= 1
    return buf.tolist()
