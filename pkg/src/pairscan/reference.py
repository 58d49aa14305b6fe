"""Published reference values used by the table drivers and acceptance tests."""

# m, x, rho, delta, w, r, sigma, approx1, approx2, monte_carlo, replications
TABLE1 = [
    (1000, 6.10, 1.0, 40, 3.0, 0.1, 4.0, 0.050, 0.034, 0.037, 2000),
    (1000, 6.10, 4.0, 40, 3.0, 0.1, 4.0, 0.061, 0.040, 0.050, 2000),
    (1000, 6.10, 10.0, 40, 3.0, 0.1, 4.0, 0.066, 0.043, 0.053, 2000),
    (1000, 6.15, 1.0, 20, 3.0, 0.1, 1.0, 0.050, 0.037, 0.016, 2000),
    (1000, 6.15, 1.0, 20, 3.0, 0.1, 1.0, 0.066, 0.044, 0.028, 2000),
    (2000, 5.00, 1.0, 20, 1.5, 0.1, 1.0, 0.059, 0.050, 0.045, 2000),
    (2000, 5.00, 0.5, 20, 1.5, 0.1, 1.0, 0.052, 0.045, 0.042, 2000),
    (2000, 5.00, 0.25, 20, 1.5, 0.1, 1.0, 0.045, 0.040, 0.027, 2000),
    (2000, 5.00, 0.5, 20, 2.0, 0.2, 1.0, 0.056, 0.048, 0.044, 2000),
    (2000, 4.00, 0.25, 40, 3.0, 0.1, 1.0, 0.053, 0.049, 0.039, 2000),
    (2000, 4.00, 0.25, 40, 3.0, 0.2, 1.0, 0.062, 0.057, 0.053, 2000),
    (2000, 4.00, 0.5, 40, 3.0, 0.1, 1.0, 0.061, 0.055, 0.039, 2000),
    (2000, 5.15, 0.5, 20, 1.5, 0.2, 1.0, 0.052, 0.044, 0.040, 2000),
    (2000, 4.00, 0.25, 20, 3.0, 0.1, 1.0, 0.090, 0.081, 0.047, 2000),
    (2000, 6.50, 0.25, 200, 1.5, 0.1, 1.0, 0.011, 0.010, 0.006, 2500),
    (2000, 7.20, 1.0, 100, 1.5, 0.1, 1.0, 0.013, 0.010, 0.007, 2500),
]

# row 9 under gamma mixing
OVERDISPERSION = {2.0: 0.056, 0.05: 0.065, 0.025: 0.070}

# (statistic, rho, delta, x): max over w in [0.5, 5], r = 0.1, m = 1e6
SEC62 = [
    ("max_w_Z", 0.5, 200.0, 11.5, 0.053, 0.051),
    ("max_w_Z", 1.0, 100.0, 11.5, 0.105, 0.101),
]

# rho = 0.5, delta = 200, m = 1e6
TABLE2_THRESHOLDS = {"fixed_ell": 11.4, "max_w_Z": 11.54, "max_w_ell": 12.05, "max_wr": 12.87,
                     "bonferroni": (12.34, 11.9)}
TABLE2_COLUMNS = ("opt", "fixed_ell", "max_w_Z", "bonferroni", "max_w_ell", "max_wr")
# r1, w1, then one value per column
TABLE2 = [
    (0.1, 2.5, 0.53, 0.52, 0.52, 0.47, 0.50, 0.45),
    (0.1, 3.0, 0.82, 0.80, 0.81, 0.80, 0.80, 0.78),
    (0.1, 2.25, 0.32, 0.32, 0.31, 0.21, 0.29, 0.24),
    (0.3, 1.4, 0.54, 0.43, 0.38, 0.47, 0.50, 0.46),
    (0.3, 2.0, 0.96, 0.96, 0.95, 0.95, 0.96, 0.96),
    (0.5, 1.0, 0.63, 0.31, 0.26, 0.48, 0.59, 0.54),
    (0.5, 1.5, 0.99, 0.96, 0.95, 0.98, 0.98, 0.98),
    (0.03, 4.0, 0.55, 0.37, 0.43, 0.46, 0.50, 0.47),
    (0.03, 4.5, 0.70, 0.51, 0.58, 0.61, 0.66, 0.64),
    (0.02, 5.0, 0.64, 0.38, 0.48, 0.50, 0.58, 0.55),
]

# published 0.05 thresholds (raw-score scale), keyed by (R, delta, sigma, p, kappa2, kind)
SV_THRESHOLDS = {
    (36, 200.0, 10.0, 0.03, 0.27, "insertion"): {"ZH": 12.3, "ZB": 10.4},
    (100, 220.0, 63.0, 0.033, 0.27, "insertion"): {"ZH": 15.2, "ZB": 0.21},
    (100, 400.0, 63.0, 0.033, 5.0, "deletion"): {"ZB": 21.8, "ZH": 10.0},
}

# (R, delta, sigma, p), r, w, hanging, bracketing; kappa2 = 0.27
TABLE4 = [
    ((36, 200.0, 10.0, 0.03), 0.5, 10, 0.86, 0.00),
    ((36, 200.0, 10.0, 0.03), 0.5, 20, 0.95, 0.74),
    ((36, 200.0, 10.0, 0.03), 0.5, 100, 0.99, 1.00),
    ((36, 200.0, 10.0, 0.03), 0.2, 50, 0.32, 0.71),
    ((36, 200.0, 10.0, 0.03), 0.1, 100, 0.03, 0.80),
    ((36, 200.0, 10.0, 0.03), 0.1, 150, 0.03, 0.51),
    ((100, 220.0, 63.0, 0.033), 0.5, 10, 1.00, 0.00),
    ((100, 220.0, 63.0, 0.033), 0.5, 100, 1.00, 0.00),
    ((100, 220.0, 63.0, 0.033), 0.1, 100, 0.19, 0.00),
    ((100, 220.0, 63.0, 0.033), 0.1, 200, 0.28, 0.00),
    ((100, 220.0, 63.0, 0.01), 0.1, 200, 0.79, 0.00),
    ((100, 220.0, 63.0, 0.033), 0.2, 10, 0.41, 0.00),
    ((100, 220.0, 63.0, 0.01), 0.2, 10, 0.85, 0.00),
    ((100, 220.0, 63.0, 0.033), 0.2, 100, 0.88, 0.00),
    ((100, 400.0, 63.0, 0.033), 0.5, 100, 1.00, 0.72),
    ((100, 400.0, 63.0, 0.033), 0.3, 200, 1.00, 0.21),
]
# the fourth row's w is read as 30: the combination remark quotes the same powers for w = 30
TABLE4_W_OVERRIDE = {3: 30}

TABLE5 = [
    ((36, 200.0, 10.0, 0.03), 0.5, 10, 0.62, 0.00),
    ((36, 200.0, 10.0, 0.03), 0.5, 20, 0.62, 0.84),
    ((36, 200.0, 10.0, 0.03), 0.5, 100, 0.62, 1.00),
    ((36, 200.0, 10.0, 0.03), 0.1, 100, 0.00, 0.99),
    ((36, 200.0, 10.0, 0.03), 0.1, 150, 0.00, 0.99),
    ((36, 200.0, 10.0, 0.03), 0.05, 150, 0.00, 0.96),
    ((36, 200.0, 10.0, 0.03), 0.01, 150, 0.00, 0.64),
    ((36, 200.0, 10.0, 0.03), 0.01, 250, 0.00, 0.75),
    ((100, 220.0, 63.0, 0.033), 0.5, 10, 0.99, 0.00),
    ((100, 220.0, 63.0, 0.033), 0.3, 10, 0.71, 0.00),
    ((100, 220.0, 63.0, 0.033), 0.3, 100, 0.71, 0.40),
    ((100, 220.0, 63.0, 0.033), 0.3, 150, 0.71, 0.95),
    ((100, 220.0, 63.0, 0.033), 0.2, 150, 0.25, 0.75),
    ((100, 400.0, 63.0, 0.033), 0.2, 100, 0.25, 0.35),
    ((100, 400.0, 63.0, 0.01), 0.2, 100, 0.75, 0.36),
    ((100, 400.0, 63.0, 0.01), 0.2, 150, 0.75, 0.94),
]

# deep sequencing: R=100, delta=400, sigma=63, p=0.033, kappa2=5
TABLE6_MODEL = (100, 400.0, 63.0, 0.033, 5.0)
TABLE6 = [
    (0.10, 5, 1.00, 0.00),
    (0.07, 50, 0.96, 0.02),
    (0.07, 100, 0.96, 0.97),
    (0.05, 150, 0.58, 1.00),
    (0.02, 200, 0.00, 0.93),
    (0.01, 250, 0.00, 0.69),
]

# combination remarks
COMBINATION = {
    "insertion_R36_sum": ((36, 200.0, 10.0, 0.03), "insertion", 0.2, 30, 0.88),
    "deletion_R100": ((100, 220.0, 63.0, 0.033), "deletion", 0.3, 100,
                      {"zh": 0.71, "zb": 0.40, "zh_half": 0.68, "zb_half": 0.36, "bonferroni": 0.80, "sum": 0.84}),
}
