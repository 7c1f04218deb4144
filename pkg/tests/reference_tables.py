"""Reference block statistics (percent) for the default benchmark sweep.

Columns follow the staffing order (2,1), (3,1), (3,2), (4,1), (4,2), (4,3).
"""

STAFFING = ((2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3))

SLOW_COLLAB = {
    "heur": {
        "max": (0.25, 0.35, 0.43, 0.77, 0.31, 1.15),
        "avg": (0.01, 0.03, 0.03, 0.12, 0.05, 0.06),
        "std": (0.03, 0.05, 0.06, 0.12, 0.06, 0.13),
    },
    "heur-lin": {
        "max": (0.25, 0.35, 0.36, 0.74, 0.57, 0.91),
        "avg": (0.01, 0.03, 0.03, 0.11, 0.04, 0.05),
        "std": (0.03, 0.04, 0.05, 0.11, 0.06, 0.10),
    },
    "pi1": {
        "max": (94.95, 81.77, 213.14, 76.24, 190.58, 300.50),
        "avg": (12.81, 12.26, 26.17, 11.34, 25.86, 36.69),
        "std": (17.25, 14.85, 34.40, 12.86, 31.87, 45.38),
    },
    "pi2:10": {
        "max": (43.81, 57.54, 111.51, 64.09, 96.36, 164.34),
        "avg": (12.10, 16.41, 12.55, 20.41, 12.49, 16.04),
        "std": (8.50, 9.94, 15.88, 12.44, 13.25, 21.94),
    },
    "pi3": {
        "max": (246.79, 376.89, 145.43, 487.64, 200.36, 107.05),
        "avg": (41.17, 68.07, 14.88, 92.05, 23.32, 7.83),
        "std": (45.08, 64.65, 23.33, 78.93, 31.26, 15.28),
    },
    "pi4": {
        "max": (29.83, 25.28, 50.01, 22.73, 64.01, 55.17),
        "avg": (5.32, 3.52, 6.77, 2.82, 6.17, 6.56),
        "std": (6.65, 4.47, 8.83, 3.85, 8.59, 8.82),
    },
}

FAST_COLLAB = {
    "heur": {
        "max": (2.01, 1.82, 4.85, 2.30, 2.70, 2.66),
        "avg": (0.08, 0.10, 0.07, 0.17, 0.09, 0.03),
        "std": (0.26, 0.21, 0.36, 0.31, 0.29, 0.20),
    },
    "heur-lin": {
        "max": (2.01, 1.77, 4.85, 2.28, 2.70, 2.66),
        "avg": (0.08, 0.09, 0.06, 0.16, 0.09, 0.03),
        "std": (0.26, 0.21, 0.35, 0.30, 0.28, 0.19),
    },
    "pi1": {
        "max": (348.39, 307.42, 594.06, 275.73, 587.44, 760.19),
        "avg": (49.32, 43.57, 73.53, 38.68, 71.19, 85.45),
        "std": (48.46, 44.50, 76.21, 40.42, 74.95, 90.43),
    },
    "pi2:10": {
        "max": (193.53, 165.53, 337.53, 144.66, 332.50, 437.46),
        "avg": (29.86, 26.59, 41.28, 25.07, 37.68, 46.19),
        "std": (25.12, 20.63, 40.45, 17.81, 37.80, 47.60),
    },
    "pi3": {
        "max": (53.24, 120.31, 18.32, 189.08, 47.19, 8.08),
        "avg": (5.64, 15.90, 0.84, 28.01, 3.14, 0.20),
        "std": (9.87, 22.88, 2.54, 36.36, 7.13, 0.89),
    },
    "pi4": {
        "max": (88.41, 116.64, 92.42, 120.02, 151.36, 78.80),
        "avg": (5.33, 7.19, 5.29, 7.79, 8.55, 3.79),
        "std": (11.46, 15.17, 10.72, 15.99, 17.09, 8.23),
    },
}

REFERENCE = {"mu1>=mu2": SLOW_COLLAB, "mu1<mu2": FAST_COLLAB}
