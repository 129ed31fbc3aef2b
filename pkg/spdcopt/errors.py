"""
Exception types for spdcopt
The CLI maps them onto exit codes (2 = configuration, 3 = resource guard)
"""


class SpdcError(Exception):
    """Base error for the package"""


class ConfigurationError(SpdcError, ValueError):
    """Invalid input or configuration"""


class UnknownCrystalError(ConfigurationError):
    """Crystal name not present in the catalog"""


class DispersionRangeError(ConfigurationError):
    """Wavelength outside a Sellmeier model's valid range"""

    def __init__(self, model: str, wavelength_um: float, valid_range: tuple):
        self.model = model
        self.wavelength_um = wavelength_um
        self.valid_range = valid_range
        super().__init__(
            f"wavelength {wavelength_um:.6g} um outside valid range "
            f"[{valid_range[0]}, {valid_range[1]}] um of model '{model}'"
        )


class PreconditionError(ConfigurationError):
    """Operation called outside its preconditions"""


class UnsupportedConfigurationError(ConfigurationError):
    """Configuration the model deliberately does not cover"""


class GridMismatchError(ConfigurationError):
    """Two JSAs sampled on different grids"""


class DegenerateInputError(SpdcError, ValueError):
    """All-zero amplitude or norm"""


class InfeasibleTargetError(SpdcError, ValueError):
    """Source cannot reach the requested photon number even without loss"""


class NoRootError(SpdcError, RuntimeError):
    """No sign change of a matching condition inside the scanned interval"""

    def __init__(self, what: str, interval: tuple):
        self.interval = interval
        super().__init__(f"no root of {what} in [{interval[0]:.6g}, {interval[1]:.6g}]")


class NonFiniteObjectiveError(SpdcError, RuntimeError):
    """Objective returned NaN or inf"""

    def __init__(self, length_mm: float, pump_fwhm_nm: float, value: float):
        self.length_mm = length_mm
        self.pump_fwhm_nm = pump_fwhm_nm
        super().__init__(
            f"non-finite alpha={value} at L={length_mm:.6g} mm, "
            f"pump FWHM={pump_fwhm_nm:.6g} nm"
        )


class ResourceGuardError(SpdcError, RuntimeError):
    """Requested grid exceeds the configured memory cap"""
