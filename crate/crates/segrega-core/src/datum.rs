//! Admissible boundary data on the unit circle: k nonnegative Lipschitz
//! traces with disjoint open-arc supports whose closures tile the circle, and
//! the alternating signed combination used by the harmonic characterization.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

const TAU: f64 = 2.0 * PI;

/// Tolerance for the closure-tiling check between consecutive arcs.
pub const ANGLE_TOL: f64 = 1e-12;

/// Default bound on |dφ/dθ| for custom-sampled profiles, in units of the
/// profile amplitude.
pub const DEFAULT_LIPSCHITZ_FACTOR: f64 = 1e3;

#[derive(Debug, Error, PartialEq)]
pub enum DatumError {
    #[error("species count must be at least 2, got {0}")]
    SpeciesCountTooSmall(usize),
    #[error("expected {expected} arcs and profiles, got {arcs} arcs, {profiles} profiles")]
    WrongLength {
        expected: usize,
        arcs: usize,
        profiles: usize,
    },
    #[error("arc {0}: start must lie in [0, 2pi), end in (start, start + 2pi)")]
    InvalidArc(usize),
    #[error("arcs {0} and {1} overlap as open sets")]
    OverlappingSupports(usize, usize),
    #[error("gap on the circle after arc {0}: closures do not tile")]
    GapOnCircle(usize),
    #[error("profile {0} must be strictly positive inside its arc and zero at the endpoints")]
    NegativeProfile(usize),
    #[error("profile {species}: difference quotient {quotient:.3e} exceeds the Lipschitz bound {bound:.3e}")]
    NonLipschitzProfile {
        species: usize,
        quotient: f64,
        bound: f64,
    },
    #[error("custom profile {0} needs at least 3 samples")]
    TooFewSamples(usize),
    #[error("alternating datum requires an even species count, got {0}")]
    OddSpeciesCount(usize),
}

/// An open arc on the unit circle, running counterclockwise from `start` to
/// `end` with 0 < end - start < 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn new(start: f64, end: f64) -> Option<Self> {
        let ok = start.is_finite()
            && end.is_finite()
            && (0.0..TAU).contains(&start)
            && end > start
            && end - start < TAU;
        ok.then_some(Self { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Offset of θ into the arc, in [0, length), using the half-open
    /// convention [start, end) lifted mod 2π. `None` if θ is outside.
    pub fn offset(&self, theta: f64) -> Option<f64> {
        let d = (theta - self.start).rem_euclid(TAU);
        (d < self.length()).then_some(d)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.offset(theta).is_some()
    }

    pub fn midpoint(&self) -> f64 {
        (self.start + 0.5 * self.length()).rem_euclid(TAU)
    }
}

/// Built-in profile shapes for a species trace on its arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileShape {
    /// A · sin(π t) with t the relative position along the arc.
    BumpSin,
    /// A · 4 t (1 - t).
    BumpPoly,
    /// A · linear interpolation of uniform samples (endpoints must vanish).
    CustomSamples,
}

/// A nonnegative Lipschitz profile vanishing exactly at its arc endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProfile {
    pub shape: ProfileShape,
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

impl BoundaryProfile {
    pub fn bump_sin(amplitude: f64) -> Self {
        Self {
            shape: ProfileShape::BumpSin,
            amplitude,
            samples: None,
        }
    }

    pub fn bump_poly(amplitude: f64) -> Self {
        Self {
            shape: ProfileShape::BumpPoly,
            amplitude,
            samples: None,
        }
    }

    pub fn custom(amplitude: f64, samples: Vec<f64>) -> Self {
        Self {
            shape: ProfileShape::CustomSamples,
            amplitude,
            samples: Some(samples),
        }
    }

    /// Evaluate at relative position t ∈ [0, 1] along the arc.
    pub fn eval_unit(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self.shape {
            ProfileShape::BumpSin => self.amplitude * (PI * t).sin(),
            ProfileShape::BumpPoly => self.amplitude * 4.0 * t * (1.0 - t),
            ProfileShape::CustomSamples => {
                let s = self.samples.as_deref().unwrap_or(&[]);
                if s.len() < 2 {
                    return 0.0;
                }
                let x = t * (s.len() - 1) as f64;
                let i = (x.floor() as usize).min(s.len() - 2);
                let frac = x - i as f64;
                self.amplitude * (s[i] * (1.0 - frac) + s[i + 1] * frac)
            }
        }
    }

    fn validate(&self, species: usize, arc_len: f64, lipschitz_factor: f64) -> Result<(), DatumError> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(DatumError::NegativeProfile(species));
        }
        if self.shape != ProfileShape::CustomSamples {
            return Ok(());
        }
        let s = self
            .samples
            .as_deref()
            .ok_or(DatumError::TooFewSamples(species))?;
        if s.len() < 3 {
            return Err(DatumError::TooFewSamples(species));
        }
        let last = s.len() - 1;
        if s[0] != 0.0 || s[last] != 0.0 {
            return Err(DatumError::NegativeProfile(species));
        }
        if s[1..last].iter().any(|&v| v <= 0.0) {
            return Err(DatumError::NegativeProfile(species));
        }
        let dt = arc_len / last as f64;
        let bound = lipschitz_factor * self.amplitude;
        for w in s.windows(2) {
            let quotient = (self.amplitude * (w[1] - w[0]) / dt).abs();
            if quotient > bound {
                return Err(DatumError::NonLipschitzProfile {
                    species,
                    quotient,
                    bound,
                });
            }
        }
        Ok(())
    }
}

/// JSON form of the admissible datum; `zeros` are derived on construction.
#[derive(Serialize, Deserialize)]
struct DatumJson {
    k: usize,
    arcs: Vec<Arc>,
    profiles: Vec<BoundaryProfile>,
}

/// An admissible boundary datum Φ = (φ_1, ..., φ_k): the arcs are given in
/// counterclockwise order, pairwise disjoint as open sets, and their closures
/// tile the circle, so Σ φ_i vanishes at exactly the k shared endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DatumJson", into = "DatumJson")]
pub struct AdmissibleDatum {
    k: usize,
    arcs: Vec<Arc>,
    profiles: Vec<BoundaryProfile>,
    zeros: Vec<f64>,
}

impl TryFrom<DatumJson> for AdmissibleDatum {
    type Error = DatumError;

    fn try_from(raw: DatumJson) -> Result<Self, DatumError> {
        if raw.arcs.len() != raw.k || raw.profiles.len() != raw.k {
            return Err(DatumError::WrongLength {
                expected: raw.k,
                arcs: raw.arcs.len(),
                profiles: raw.profiles.len(),
            });
        }
        AdmissibleDatum::build(raw.k, raw.arcs, raw.profiles)
    }
}

impl From<AdmissibleDatum> for DatumJson {
    fn from(d: AdmissibleDatum) -> DatumJson {
        DatumJson {
            k: d.k,
            arcs: d.arcs,
            profiles: d.profiles,
        }
    }
}

impl AdmissibleDatum {
    /// Validate and construct a datum from arcs in counterclockwise order.
    pub fn build(
        k: usize,
        arcs: Vec<Arc>,
        profiles: Vec<BoundaryProfile>,
    ) -> Result<Self, DatumError> {
        Self::build_with_lipschitz_factor(k, arcs, profiles, DEFAULT_LIPSCHITZ_FACTOR)
    }

    pub fn build_with_lipschitz_factor(
        k: usize,
        arcs: Vec<Arc>,
        profiles: Vec<BoundaryProfile>,
        lipschitz_factor: f64,
    ) -> Result<Self, DatumError> {
        if k < 2 {
            return Err(DatumError::SpeciesCountTooSmall(k));
        }
        if arcs.len() != k || profiles.len() != k {
            return Err(DatumError::WrongLength {
                expected: k,
                arcs: arcs.len(),
                profiles: profiles.len(),
            });
        }
        for (i, a) in arcs.iter().enumerate() {
            if Arc::new(a.start, a.end).is_none() {
                return Err(DatumError::InvalidArc(i));
            }
        }
        // Closure tiling: each arc must end exactly where the next begins.
        // Working pairwise also rules out overlaps between non-adjacent arcs,
        // given the total length constraint checked below.
        for i in 0..k {
            let next = arcs[(i + 1) % k];
            let gap = (next.start - arcs[i].end).rem_euclid(TAU);
            let gap = if gap > PI { gap - TAU } else { gap };
            if gap > ANGLE_TOL {
                return Err(DatumError::GapOnCircle(i));
            }
            if gap < -ANGLE_TOL {
                return Err(DatumError::OverlappingSupports(i, (i + 1) % k));
            }
        }
        let total: f64 = arcs.iter().map(Arc::length).sum();
        if (total - TAU).abs() > (k as f64) * ANGLE_TOL {
            if total > TAU {
                return Err(DatumError::OverlappingSupports(0, k - 1));
            }
            return Err(DatumError::GapOnCircle(k - 1));
        }
        for (i, p) in profiles.iter().enumerate() {
            p.validate(i, arcs[i].length(), lipschitz_factor)?;
        }
        let zeros = arcs.iter().map(|a| a.start.rem_euclid(TAU)).collect();
        Ok(Self {
            k,
            arcs,
            profiles,
            zeros,
        })
    }

    /// k equal sin-bump arcs starting at `phase`.
    pub fn equal_bumps(k: usize, amplitude: f64, phase: f64) -> Self {
        let len = TAU / k as f64;
        let arcs = (0..k)
            .map(|i| {
                let start = (phase + i as f64 * len).rem_euclid(TAU);
                Arc { start, end: start + len }
            })
            .collect();
        let profiles = (0..k).map(|_| BoundaryProfile::bump_sin(amplitude)).collect();
        Self::build(k, arcs, profiles).expect("equal tiling is always admissible")
    }

    /// Random admissible datum with sin-bump profiles: cut angles drawn
    /// uniformly (rejecting tilings with an arc shorter than `min_arc`),
    /// amplitudes in [0.5, 2].
    pub fn random<R: Rng>(k: usize, min_arc: f64, rng: &mut R) -> Self {
        assert!(k as f64 * min_arc < TAU, "min_arc too large for k arcs");
        let cuts = loop {
            let mut cuts: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let ok = cuts
                .windows(2)
                .all(|w| w[1] - w[0] >= min_arc)
                && (cuts[0] + TAU - cuts[k - 1]) >= min_arc;
            if ok {
                break cuts;
            }
        };
        let arcs: Vec<Arc> = (0..k)
            .map(|i| {
                let start = cuts[i];
                let end = if i + 1 < k { cuts[i + 1] } else { cuts[0] + TAU };
                Arc { start, end }
            })
            .collect();
        let profiles = (0..k)
            .map(|_| BoundaryProfile::bump_sin(rng.gen_range(0.5..2.0)))
            .collect();
        Self::build(k, arcs, profiles).expect("construction is valid by design")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn profiles(&self) -> &[BoundaryProfile] {
        &self.profiles
    }

    /// The k zeros of Σ φ_i, i.e. the shared arc endpoints.
    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// Largest profile amplitude; the natural scale for tolerances.
    pub fn amplitude(&self) -> f64 {
        self.profiles
            .iter()
            .map(|p| p.amplitude)
            .fold(0.0, f64::max)
    }

    /// Index of the species whose arc contains θ (half-open convention).
    pub fn species_at(&self, theta: f64) -> Option<usize> {
        self.arcs.iter().position(|a| a.contains(theta))
    }

    /// φ_i(θ); zero outside the support of species i.
    pub fn eval_species(&self, i: usize, theta: f64) -> f64 {
        match self.arcs[i].offset(theta) {
            Some(d) => self.profiles[i].eval_unit(d / self.arcs[i].length()),
            None => 0.0,
        }
    }

    /// Σ φ_i(θ): the single nonzero trace at θ, or 0 at a shared endpoint.
    pub fn eval(&self, theta: f64) -> f64 {
        match self.species_at(theta) {
            Some(i) => self.eval_species(i, theta),
            None => 0.0,
        }
    }
}

/// The alternating datum Φ^a = Σ_{j=1}^{2s} (-1)^j φ_j; species are indexed
/// from zero here, so species i carries sign (-1)^{i+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlternatingDatum {
    base: AdmissibleDatum,
}

impl AlternatingDatum {
    pub fn new(base: AdmissibleDatum) -> Result<Self, DatumError> {
        if base.k() % 2 != 0 {
            return Err(DatumError::OddSpeciesCount(base.k()));
        }
        Ok(Self { base })
    }

    /// Sign carried by species i (0-based): -1 for even i, +1 for odd i.
    pub fn sign(i: usize) -> f64 {
        if i % 2 == 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// The datum whose alternating combination is exactly A·cos(sθ):
    /// 2s equal sin-bump arcs of length π/s starting at π/(2s).
    pub fn cosine_mode(s: usize, amplitude: f64) -> Self {
        assert!(s >= 1);
        let base = AdmissibleDatum::equal_bumps(2 * s, amplitude, PI / (2.0 * s as f64));
        Self { base }
    }

    /// 2s equal sin-bump arcs starting at 0; the alternating combination is
    /// exactly -A·sin(sθ).
    pub fn symmetric(s: usize, amplitude: f64) -> Self {
        assert!(s >= 1);
        let base = AdmissibleDatum::equal_bumps(2 * s, amplitude, 0.0);
        Self { base }
    }

    pub fn random<R: Rng>(s: usize, min_arc: f64, rng: &mut R) -> Self {
        Self {
            base: AdmissibleDatum::random(2 * s, min_arc, rng),
        }
    }

    pub fn base(&self) -> &AdmissibleDatum {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    /// Half species count s = k/2.
    pub fn s(&self) -> usize {
        self.base.k() / 2
    }

    pub fn amplitude(&self) -> f64 {
        self.base.amplitude()
    }

    /// Σ (-1)^j φ_j(θ): alternates sign across adjacent arcs, vanishing
    /// exactly at the 2s shared endpoints.
    pub fn eval(&self, theta: f64) -> f64 {
        match self.base.species_at(theta) {
            Some(i) => Self::sign(i) * self.base.eval_species(i, theta),
            None => 0.0,
        }
    }

    /// Datum with the species indexing shifted by one (j → j+1), which
    /// negates the alternating combination.
    pub fn shift_indexing(&self) -> Self {
        let k = self.k();
        let arcs: Vec<Arc> = (0..k).map(|i| self.base.arcs[(i + k - 1) % k]).collect();
        let profiles: Vec<BoundaryProfile> =
            (0..k).map(|i| self.base.profiles[(i + k - 1) % k].clone()).collect();
        // Re-sort into ccw order starting from the first arc of the rotated
        // list; rotation preserves admissibility.
        let base = AdmissibleDatum {
            k,
            zeros: arcs.iter().map(|a| a.start.rem_euclid(TAU)).collect(),
            arcs,
            profiles,
        };
        Self { base }
    }

    /// Number of sign changes of the alternating datum over one circle
    /// traversal, counted on a uniform sample grid.
    pub fn sign_changes(&self, samples: usize) -> usize {
        let vals: Vec<f64> = (0..samples)
            .map(|m| self.eval(TAU * (m as f64 + 0.5) / samples as f64))
            .filter(|v| *v != 0.0)
            .collect();
        let mut changes = 0;
        for i in 0..vals.len() {
            let next = vals[(i + 1) % vals.len()];
            if vals[i].signum() != next.signum() {
                changes += 1;
            }
        }
        changes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_species() -> AdmissibleDatum {
        AdmissibleDatum::build(
            2,
            vec![Arc { start: 0.0, end: PI }, Arc { start: PI, end: TAU }],
            vec![BoundaryProfile::bump_sin(1.0), BoundaryProfile::bump_sin(1.0)],
        )
        .unwrap()
    }

    #[test]
    fn k2_tiling_is_valid() {
        let d = two_species();
        assert_eq!(d.zeros(), &[0.0, PI]);
        // theta = pi/2 lies in the first arc
        assert!((d.eval(PI / 2.0) - 1.0).abs() < 1e-15);
        assert!((d.eval(PI / 2.0) - d.eval_species(0, PI / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn k6_symmetric_tiling() {
        let d = AdmissibleDatum::equal_bumps(6, 1.0, 0.0);
        for (i, z) in d.zeros().iter().enumerate() {
            assert!((z - i as f64 * PI / 3.0).abs() < 1e-12);
            assert_eq!(d.eval(*z), 0.0);
        }
        // arc midpoint hits the bump peak
        assert!((d.eval(PI / 6.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_arcs_rejected() {
        let arcs = vec![
            Arc { start: 0.0, end: PI },
            Arc { start: PI, end: 1.5 * PI },
            Arc { start: 1.5 * PI - 0.1, end: TAU },
        ];
        let profiles = vec![BoundaryProfile::bump_sin(1.0); 3];
        let err = AdmissibleDatum::build(3, arcs, profiles).unwrap_err();
        assert!(matches!(
            err,
            DatumError::OverlappingSupports(..) | DatumError::GapOnCircle(..)
        ));
    }

    #[test]
    fn gap_rejected() {
        let arcs = vec![
            Arc { start: 0.0, end: PI },
            Arc { start: PI + 0.2, end: TAU },
        ];
        let profiles = vec![BoundaryProfile::bump_sin(1.0); 2];
        assert_eq!(
            AdmissibleDatum::build(2, arcs, profiles),
            Err(DatumError::GapOnCircle(0))
        );
    }

    #[test]
    fn custom_profile_validation() {
        let arc = vec![Arc { start: 0.0, end: PI }, Arc { start: PI, end: TAU }];
        let bad = vec![
            BoundaryProfile::custom(1.0, vec![0.0, -0.5, 0.0]),
            BoundaryProfile::bump_sin(1.0),
        ];
        assert_eq!(
            AdmissibleDatum::build(2, arc.clone(), bad),
            Err(DatumError::NegativeProfile(0))
        );
        let steep = vec![
            BoundaryProfile::custom(1.0, vec![0.0, 1.0, 0.0]),
            BoundaryProfile::bump_sin(1.0),
        ];
        // quotient 1/(pi/2) is far below the default bound
        assert!(AdmissibleDatum::build(2, arc.clone(), steep).is_ok());
        let mut samples = vec![0.0; 20001];
        for (i, s) in samples.iter_mut().enumerate().skip(1).take(19999) {
            *s = if i % 2 == 0 { 1e-6 } else { 1.0 };
        }
        let jagged = vec![
            BoundaryProfile::custom(1.0, samples),
            BoundaryProfile::bump_sin(1.0),
        ];
        assert!(matches!(
            AdmissibleDatum::build(2, arc, jagged),
            Err(DatumError::NonLipschitzProfile { species: 0, .. })
        ));
    }

    #[test]
    fn supports_are_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = AdmissibleDatum::random(5, 0.3, &mut rng);
        for m in 0..512 {
            let th = TAU * m as f64 / 512.0;
            let positive: Vec<usize> = (0..d.k())
                .filter(|&i| d.eval_species(i, th) > 0.0)
                .collect();
            assert!(positive.len() <= 1, "supports overlap at theta={th}");
        }
    }

    #[test]
    fn alternating_matches_cos_mode() {
        let alt = AlternatingDatum::cosine_mode(3, 1.0);
        for m in 0..720 {
            let th = TAU * m as f64 / 720.0;
            assert!(
                (alt.eval(th) - (3.0 * th).cos()).abs() < 1e-12,
                "theta={th}"
            );
        }
    }

    #[test]
    fn alternating_sign_structure() {
        let alt = AlternatingDatum::symmetric(3, 1.0);
        // signs agree with -sin(3θ) arcwise
        for m in 0..720 {
            let th = TAU * (m as f64 + 0.5) / 720.0;
            let v = alt.eval(th);
            let model = -(3.0 * th).sin();
            if model.abs() > 1e-3 {
                assert_eq!(v.signum(), model.signum(), "theta={th}");
            }
        }
        assert_eq!(alt.sign_changes(1440), 6);
        for z in alt.base().zeros() {
            assert_eq!(alt.eval(*z), 0.0);
        }
    }

    #[test]
    fn odd_species_count_rejected() {
        let arcs = vec![
            Arc { start: 0.0, end: 2.0 },
            Arc { start: 2.0, end: 4.0 },
            Arc { start: 4.0, end: TAU },
        ];
        let d = AdmissibleDatum::build(3, arcs, vec![BoundaryProfile::bump_sin(1.0); 3]).unwrap();
        assert_eq!(
            AlternatingDatum::new(d).unwrap_err(),
            DatumError::OddSpeciesCount(3)
        );
    }

    #[test]
    fn alternating_abs_equals_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alt = AlternatingDatum::random(3, 0.2, &mut rng);
        for m in 0..512 {
            let th = TAU * m as f64 / 512.0;
            assert!((alt.eval(th).abs() - alt.base().eval(th)).abs() < 1e-15);
        }
    }

    #[test]
    fn shift_indexing_negates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alt = AlternatingDatum::random(2, 0.3, &mut rng);
        let shifted = alt.shift_indexing();
        for m in 0..256 {
            let th = TAU * m as f64 / 256.0;
            assert!((shifted.eval(th) + alt.eval(th)).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let d = AdmissibleDatum::random(6, 0.2, &mut rng);
        let text = serde_json::to_string(&d).unwrap();
        let parsed: AdmissibleDatum = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, d);
        let text2 = serde_json::to_string(&parsed).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn json_schema_field_names() {
        let d = two_species();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["k"], 2);
        assert!(v["arcs"][0]["start"].is_number());
        assert!(v["arcs"][0]["end"].is_number());
        assert_eq!(v["profiles"][0]["shape"], "bump_sin");
        assert!(v["profiles"][0]["amplitude"].is_number());
        assert!(v["profiles"][0].get("samples").is_none());
    }

    #[test]
    fn invalid_json_rejected() {
        let text = r#"{"k":2,"arcs":[{"start":0.0,"end":3.0},{"start":3.2,"end":6.283185307179586}],
            "profiles":[{"shape":"bump_sin","amplitude":1.0},{"shape":"bump_sin","amplitude":1.0}]}"#;
        assert!(serde_json::from_str::<AdmissibleDatum>(text).is_err());
    }

    proptest! {
        #[test]
        fn random_tilings_are_admissible(seed in 0u64..500, k in 2usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = AdmissibleDatum::random(k, 0.1, &mut rng);
            // product of distinct traces vanishes pointwise
            for m in 0..128 {
                let th = TAU * m as f64 / 128.0;
                for i in 0..k {
                    for j in 0..i {
                        prop_assert_eq!(d.eval_species(i, th) * d.eval_species(j, th), 0.0);
                    }
                }
            }
            prop_assert!(d.eval(d.zeros()[0]) == 0.0);
        }

        #[test]
        fn alternating_sign_change_count(seed in 0u64..200, s in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let alt = AlternatingDatum::random(s, 0.15, &mut rng);
            prop_assert_eq!(alt.sign_changes(4096), 2 * s);
        }
    }
}
