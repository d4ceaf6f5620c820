"""IID-GAN - inverse-regularised GAN and synthetic mode-collapse benchmarks."""

__version__ = "0.1.0"
__author__ = "Development Team"
__email__ = "dev@company.com"
