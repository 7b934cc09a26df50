"""Published reference values shared by the test modules."""

# (omega/J, f0/omega, f1/omega, f2/omega, c_zxz/J)
REFERENCE_ROWS = [
    (1.0, 0.2, -2.1285310408898304, -2.678165158151617, -0.2),
    (2.0, 0.1, -0.15660928207162234, -0.1984060069686025, -0.2),
    (5.0, 0.04, 1.0849517026900328, 1.2455409822710848, -0.2),
]

# cluster preparation drive, omega = 10 J
CLUSTER_OMEGA = 10.0
CLUSTER_C_OVER_OMEGA = -0.009
CLUSTER_HARMONICS = (1.200, 1.224)

# nanomagnet field amplitudes in gauss: B0x, B1x, B2x, B0y, B1y, B2y
NANOMAGNET_FIELDS_G = (2.3, 32.3, 35.9, 3.3, 45.4, 52.1)
NANOMAGNET_OMEGA_MHZ = 375.0
