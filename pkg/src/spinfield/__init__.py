"""Spin-s Gaussian random fields on the sphere.

Fields are synthesized from a convolution square root of their covariance
spectrum on SO(3) and checked against their second-order laws by Monte Carlo.
"""

from .errors import (BandLimitError, ChartDomainError, DomainError, NegativeCoefficientError, RealityError,
                     ResourceError, ShapeMismatchError, SpinFieldError, SpinMismatchError)
from .so3 import KElement, Rotation, SpherePoint, act, character, compose, inverse, k_factor, section
from .harmonics import (QuadratureRule, legendre, quadrature, spin_sph_harm, wigner_D, wigner_D_entry,
                        wigner_d)
from .spectral import (AllPlus, Alternating, CovarianceSpectrum, ExplicitSigns, ScalarSpectrum, SpinSpectrum,
                       analyze, check_positive_definite, convolve, halfsphere_f_coefficients, involution,
                       levy_c, levy_phi_coefficients, phi_from_f, sqrt_spectrum, synthesize_fn)
from .fieldsynth import (CoefficientDraw, FieldRealization, Reality, draw_coefficients, levy_field,
                         levy_samples, pullback_samples, synthesize_field, synthesize_pullback)
from .reports import EstimatorReport, VerificationReport
from .inference import (distance_variance_check, empirical_covariance, empirical_relation, estimate_spectrum,
                        isotropy_check, levy_law_checks, levy_variance_check)
from .bundle import Chart, TangentFrame, psi_angle, transition, verify_angle_lemma, verify_cocycle

__version__ = "0.1.0"
