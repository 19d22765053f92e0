use crate::scalar::Real;

/// Diabatic transition probability exp(−2πΔ0W/4Γ).
pub fn lz_probability<T: Real>(delta0: T, width: T, runrate: T) -> T {
    (-T::TAU() * delta0 * width / (T::of(4.0) * runrate)).exp()
}

/// Run rate at which 1 − P_LZ equals `target_qa`.
pub fn lz_max_rate<T: Real>(delta0: T, width: T, target_qa: T) -> T {
    T::PI() * delta0 * width / (-T::of(2.0) * (T::one() - target_qa).ln())
}

/// Frequency (1/2πΓ)·√(λ_z² + α1²) of transverse oscillations of a cell whose
/// neighbours have settled.
pub fn rabi_frequency<T: Real>(lambda_z: T, alpha1: T, runrate: T) -> T {
    (lambda_z * lambda_z + alpha1 * alpha1).sqrt() / (T::TAU() * runrate)
}
