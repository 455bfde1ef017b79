use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space link parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    distance: f64,
    wavelength: f64,
    beta: f64,
}

impl PropagationParams {
    pub fn new(distance: f64, wavelength: f64, beta: f64) -> Result<Self> {
        for (name, x) in [
            ("distance", distance),
            ("wavelength", wavelength),
            ("beta", beta),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {x}"
                )));
            }
        }
        Ok(PropagationParams {
            distance,
            wavelength,
            beta,
        })
    }

    pub fn from_frequency(distance: f64, carrier_hz: f64, beta: f64) -> Result<Self> {
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "carrier must be positive, got {carrier_hz}"
            )));
        }
        Self::new(distance, SPEED_OF_LIGHT / carrier_hz, beta)
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn carrier_freq(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Far-field amplitude `βλ / (4πD)`.
    pub fn far_field_gain(&self) -> f64 {
        self.beta * self.wavelength / (4.0 * std::f64::consts::PI * self.distance)
    }

    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        Self::new(distance, self.wavelength, self.beta)
    }
}
