"""Package-wide numerical defaults."""

# largest qubit count for which dense 2^N x 2^N matrices are built
DENSE_CAP = 12

# coefficients smaller than this are dropped after arithmetic
COEFF_TOL = 1e-12

# residual threshold for accepting a new direction during orthogonalization
RANK_TOL = 1e-9


def set_dense_cap(n):
    global DENSE_CAP
    if n < 1:
        raise ValueError("dense cap must be positive")
    DENSE_CAP = int(n)
