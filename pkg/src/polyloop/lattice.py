"""Integer lattices: kernels and Hermite normal forms over Z."""


def hermite_normal_form(rows):
    """Row-style HNF of an integer matrix, zero rows dropped.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``.
    """
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    top = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(top, len(rows)) if rows[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(rows[i][col]), i))
            rows[top], rows[piv] = rows[piv], rows[top]
            clean = True
            for i in range(top + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // rows[top][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[top])]
                    if rows[i][col]:
                        clean = False
            if clean:
                if rows[top][col] < 0:
                    rows[top] = [-a for a in rows[top]]
                for i in range(top):
                    q = rows[i][col] // rows[top][col]
                    if q:
                        rows[i] = [a - q * b for a, b in zip(rows[i], rows[top])]
                top += 1
                break
        if top == len(rows):
            break
    return [r for r in rows[:top] if any(r)]


def integer_kernel(matrix, ncols=None):
    """Basis (in HNF) of ``{v in Z^ncols : matrix @ v = 0}``."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    m = len(matrix)
    # rows of [matrix^T | I]; unimodular row operations keep the right block a basis
    work = [[matrix[r][c] for r in range(m)] + [int(i == c) for i in range(ncols)]
            for c in range(ncols)]
    top = 0
    for col in range(m):
        while True:
            nz = [i for i in range(top, ncols) if work[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(work[i][col]), i))
            work[top], work[piv] = work[piv], work[top]
            clean = True
            for i in range(top + 1, ncols):
                if work[i][col]:
                    q = work[i][col] // work[top][col]
                    work[i] = [a - q * b for a, b in zip(work[i], work[top])]
                    if work[i][col]:
                        clean = False
            if clean:
                top += 1
                break
    kernel = [row[m:] for row in work[top:]]
    return hermite_normal_form(kernel)
