//! Catalog of audit checks and the records they produce.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    FlowCompleted,
    AreaGrowth,
    QMonotone,
    QLimit,
    QConstant,
    HawkingMonotone,
    HawkingEqualsMass,
    AlignmentRate,
    MeanCurvatureProfile,
    TracelessDecay,
    MinkowskiRigidity,
    HkRigidity,
    MinkowskiInequality,
    HkInequality,
    ArealMinkowskiInequality,
    SurfaceGravityBound,
    MassUpperBound,
    ReversePenrose,
    HorizonAreaBound,
    AreaWindow,
    WindowRoundTrip,
    WindowDegenerate,
    ChMass,
    StaticResidual,
    StaticDetector,
}

impl CheckKind {
    pub const ALL: [CheckKind; 25] = [
        CheckKind::FlowCompleted,
        CheckKind::AreaGrowth,
        CheckKind::QMonotone,
        CheckKind::QLimit,
        CheckKind::QConstant,
        CheckKind::HawkingMonotone,
        CheckKind::HawkingEqualsMass,
        CheckKind::AlignmentRate,
        CheckKind::MeanCurvatureProfile,
        CheckKind::TracelessDecay,
        CheckKind::MinkowskiRigidity,
        CheckKind::HkRigidity,
        CheckKind::MinkowskiInequality,
        CheckKind::HkInequality,
        CheckKind::ArealMinkowskiInequality,
        CheckKind::SurfaceGravityBound,
        CheckKind::MassUpperBound,
        CheckKind::ReversePenrose,
        CheckKind::HorizonAreaBound,
        CheckKind::AreaWindow,
        CheckKind::WindowRoundTrip,
        CheckKind::WindowDegenerate,
        CheckKind::ChMass,
        CheckKind::StaticResidual,
        CheckKind::StaticDetector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::FlowCompleted => "flow_completed",
            CheckKind::AreaGrowth => "area_growth",
            CheckKind::QMonotone => "q_monotone",
            CheckKind::QLimit => "q_limit",
            CheckKind::QConstant => "q_constant",
            CheckKind::HawkingMonotone => "hawking_monotone",
            CheckKind::HawkingEqualsMass => "hawking_equals_mass",
            CheckKind::AlignmentRate => "alignment_rate",
            CheckKind::MeanCurvatureProfile => "mean_curvature_profile",
            CheckKind::TracelessDecay => "traceless_decay",
            CheckKind::MinkowskiRigidity => "minkowski_rigidity",
            CheckKind::HkRigidity => "hk_rigidity",
            CheckKind::MinkowskiInequality => "minkowski_inequality",
            CheckKind::HkInequality => "hk_inequality",
            CheckKind::ArealMinkowskiInequality => "areal_minkowski_inequality",
            CheckKind::SurfaceGravityBound => "surface_gravity_bound",
            CheckKind::MassUpperBound => "mass_upper_bound",
            CheckKind::ReversePenrose => "reverse_penrose",
            CheckKind::HorizonAreaBound => "horizon_area_bound",
            CheckKind::AreaWindow => "area_window",
            CheckKind::WindowRoundTrip => "window_round_trip",
            CheckKind::WindowDegenerate => "window_degenerate",
            CheckKind::ChMass => "ch_mass",
            CheckKind::StaticResidual => "static_residual",
            CheckKind::StaticDetector => "static_detector",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// The claim a check exercises, as recorded in audit reports.
    pub fn tag(self) -> &'static str {
        match self {
            CheckKind::FlowCompleted => "long-time existence of the graphical flow",
            CheckKind::AreaGrowth => "exponential area growth under IMCF",
            CheckKind::QMonotone => "monotonicity of Q along IMCF",
            CheckKind::QLimit => "Q bounded below by its asymptotic limit",
            CheckKind::QConstant => "Q constant on Kottler slices",
            CheckKind::HawkingMonotone => "Geroch monotonicity of the Hawking mass",
            CheckKind::HawkingEqualsMass => "Hawking mass of Kottler slices equals m (w2 / 4 pi)^(3/2)",
            CheckKind::AlignmentRate => "C1 convergence of the flow at rate e^-t",
            CheckKind::MeanCurvatureProfile => "mean curvature approaches 2 like t e^-t",
            CheckKind::TracelessDecay => "umbilicity in the limit",
            CheckKind::MinkowskiRigidity => "Minkowski inequality, equality on slices",
            CheckKind::HkRigidity => "Heintze-Karcher inequality, equality on slices",
            CheckKind::MinkowskiInequality => "Minkowski inequality for star-shaped mean-convex graphs",
            CheckKind::HkInequality => "Heintze-Karcher inequality with horizon term",
            CheckKind::ArealMinkowskiInequality => "areal Minkowski inequality",
            CheckKind::SurfaceGravityBound => "surface gravity bound, equality on Kottler",
            CheckKind::MassUpperBound => "horizon mass upper bound, equality on Kottler",
            CheckKind::ReversePenrose => "reverse Penrose inequality, equality on Kottler",
            CheckKind::HorizonAreaBound => "horizon area lower bound for hyperbolic infinity",
            CheckKind::AreaWindow => "horizon area window from surface gravity",
            CheckKind::WindowRoundTrip => "area window radii have the given surface gravity",
            CheckKind::WindowDegenerate => "area window collapses at the minimal surface gravity",
            CheckKind::ChMass => "Chrusciel-Herzlich mass of Kottler equals m",
            CheckKind::StaticResidual => "Kottler potential solves the static equations",
            CheckKind::StaticDetector => "static residual detects a wrong potential",
        }
    }

    pub fn needs_flow(self) -> bool {
        matches!(
            self,
            CheckKind::FlowCompleted
                | CheckKind::AreaGrowth
                | CheckKind::QMonotone
                | CheckKind::QLimit
                | CheckKind::QConstant
                | CheckKind::HawkingMonotone
                | CheckKind::HawkingEqualsMass
                | CheckKind::AlignmentRate
                | CheckKind::MeanCurvatureProfile
                | CheckKind::TracelessDecay
        )
    }

    pub fn default_tolerance(self, slice: bool) -> f64 {
        match self {
            CheckKind::FlowCompleted
            | CheckKind::MeanCurvatureProfile
            | CheckKind::HorizonAreaBound
            | CheckKind::StaticDetector => 0.0,
            CheckKind::AreaGrowth if slice => 1e-10,
            CheckKind::AreaGrowth => 1e-4,
            CheckKind::QMonotone | CheckKind::QLimit | CheckKind::HawkingMonotone => 1e-6,
            CheckKind::QConstant
            | CheckKind::HawkingEqualsMass
            | CheckKind::MinkowskiRigidity
            | CheckKind::HkRigidity => 1e-10,
            CheckKind::AlignmentRate => 0.25,
            CheckKind::TracelessDecay => 0.1,
            CheckKind::MinkowskiInequality | CheckKind::HkInequality | CheckKind::ArealMinkowskiInequality => 1e-8,
            CheckKind::SurfaceGravityBound
            | CheckKind::MassUpperBound
            | CheckKind::ReversePenrose
            | CheckKind::AreaWindow
            | CheckKind::WindowRoundTrip
            | CheckKind::WindowDegenerate => 1e-12,
            CheckKind::ChMass => 1e-3,
            CheckKind::StaticResidual => 1e-9,
        }
    }

    /// `Err` holds the reason the check cannot run on the given setup.
    pub fn applicable(self, curvature_sign: i32, slice: bool) -> Result<(), &'static str> {
        match self {
            CheckKind::QConstant | CheckKind::HawkingEqualsMass | CheckKind::MinkowskiRigidity | CheckKind::HkRigidity
                if !slice =>
            {
                Err("needs a slice")
            }
            CheckKind::ReversePenrose | CheckKind::HorizonAreaBound if curvature_sign != -1 => {
                Err("needs a hyperbolic background")
            }
            CheckKind::AreaWindow | CheckKind::WindowRoundTrip | CheckKind::WindowDegenerate
                if curvature_sign != 1 =>
            {
                Err("needs a spherical background")
            }
            _ => Ok(()),
        }
    }

    pub fn default_set(curvature_sign: i32, slice: bool) -> Vec<CheckKind> {
        let mut set = vec![CheckKind::FlowCompleted, CheckKind::AreaGrowth, CheckKind::QMonotone];
        if slice {
            set.extend([
                CheckKind::QConstant,
                CheckKind::HawkingEqualsMass,
                CheckKind::MinkowskiRigidity,
                CheckKind::HkRigidity,
            ]);
        } else {
            set.extend([CheckKind::HawkingMonotone, CheckKind::MinkowskiInequality, CheckKind::HkInequality]);
        }
        set.extend([CheckKind::SurfaceGravityBound, CheckKind::MassUpperBound, CheckKind::StaticResidual]);
        if curvature_sign == -1 {
            set.push(CheckKind::ReversePenrose);
        }
        set
    }
}

mod nullable_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            s.serialize_f64(*value)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// How a check compares its value with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `value <= bound + tolerance`.
    AtMost,
    /// `value >= bound - tolerance`.
    AtLeast,
    /// `|value - bound| <= tolerance`.
    Near,
    /// `value < bound`.
    Below,
    /// `value > bound`.
    Above,
    /// `bound - tolerance <= value <= upper + tolerance`.
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub tag: String,
    /// Non-finite values are stored as `null`.
    #[serde(with = "nullable_float")]
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn new(kind: CheckKind, value: f64, relation: Relation, bound: f64, tolerance: f64) -> Self {
        Self::build(kind, value, relation, bound, None, tolerance)
    }

    pub fn within(kind: CheckKind, value: f64, lower: f64, upper: f64, tolerance: f64) -> Self {
        Self::build(kind, value, Relation::Within, lower, Some(upper), tolerance)
    }

    /// A check that could not be evaluated.
    pub fn failed(kind: CheckKind, error: impl Into<String>, tolerance: f64) -> Self {
        Check {
            name: kind.name().into(),
            tag: kind.tag().into(),
            value: f64::NAN,
            relation: Relation::AtMost,
            bound: 0.0,
            upper: None,
            tolerance,
            passed: false,
            error: Some(error.into()),
        }
    }

    fn build(kind: CheckKind, value: f64, relation: Relation, bound: f64, upper: Option<f64>, tolerance: f64) -> Self {
        let finite = value.is_finite() && bound.is_finite() && upper.is_none_or(f64::is_finite);
        let holds = match relation {
            Relation::AtMost => value <= bound + tolerance,
            Relation::AtLeast => value >= bound - tolerance,
            Relation::Near => (value - bound).abs() <= tolerance,
            Relation::Below => value < bound,
            Relation::Above => value > bound,
            Relation::Within => value >= bound - tolerance && value <= upper.unwrap_or(bound) + tolerance,
        };
        Check {
            name: kind.name().into(),
            tag: kind.tag().into(),
            value,
            relation,
            bound,
            upper,
            tolerance,
            passed: finite && holds,
            error: None,
        }
    }
}
