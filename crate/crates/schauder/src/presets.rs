//! Named operators, bases, elements, functions and delay scenarios.

use schauder_core::delay_ode::{DelayScenario, ScalarRule};
use schauder_core::linalg::Matrix;
use schauder_core::operators::{MultiplierTail, ScalarMap};
use schauder_core::space::WeightTail;
use schauder_core::{BasisSpec, ContractionClass, Element, OperatorKind, OperatorSpec};
use serde::Serialize;

/// Kind of object a preset names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Operator,
    Basis,
    Element,
    Function,
    Delay,
}

/// Listing entry.
#[derive(Clone, Debug, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub category: Category,
    pub description: &'static str,
}

const fn info(name: &'static str, category: Category, description: &'static str) -> PresetInfo {
    PresetInfo {
        name,
        category,
        description,
    }
}

/// Every shipped preset, grouped by category.
pub const PRESETS: &[PresetInfo] = &[
    info(
        "diag-half",
        Category::Operator,
        "diagonal, every multiplier 0.5; contractive K = 0.5",
    ),
    info(
        "diag-decay",
        Category::Operator,
        "diagonal, k_i = 0.7^i; contractive K = 0.7",
    ),
    info(
        "diag-nonexpansive",
        Category::Operator,
        "diagonal [1, -1, 0.5], then 1; nonexpansive",
    ),
    info(
        "affine-1d",
        Category::Operator,
        "x -> 0.5 x_1 e_1 + e_1 on the first coordinate, 0 beyond; fixed point 2 e_1",
    ),
    info(
        "affine-block",
        Category::Operator,
        "2x2 block [[0.3, 0.2], [-0.1, 0.4]], gamma 0.2, offset (1, -1)",
    ),
    info(
        "nilpotent-shift",
        Category::Operator,
        "block [[0, 2], [0, 0]], gamma 0.3; asymptotically contractive K = 0.3",
    ),
    info(
        "tanh-contraction",
        Category::Operator,
        "x_i -> 0.8 tanh(x_i); contractive K = 0.8",
    ),
    info("canonical", Category::Basis, "canonical unit vectors of l2"),
    info("weighted-decay", Category::Basis, "e_i = 0.9^i u_i"),
    info("e1", Category::Element, "first unit vector"),
    info(
        "geo-half",
        Category::Element,
        "x_i = 2^(1-i), norm sqrt(4/3)",
    ),
    info("finite-pair", Category::Element, "(1, -2)"),
    info("zero", Category::Element, "origin"),
    info("zero", Category::Function, "constant 0"),
    info("a0-reference", Category::Function, "constant 0.4"),
    info("lambda-reciprocal", Category::Function, "0.5 / (1 + t)"),
    info("phi-one", Category::Function, "constant 1"),
    info(
        "delay-reference",
        Category::Delay,
        "a = -1, a0 = 0.4, lambda = 0.5/(1+t), h = 0.5, T_s = 1, phi = 1, dt = 1e-3, horizon 40",
    ),
    info("delay-free", Category::Delay, "delay-reference with a0 = 0"),
];

/// Operator preset by name.
pub fn operator(name: &str) -> Option<OperatorSpec> {
    let op = match name {
        "diag-half" => OperatorSpec::constant_diagonal(0.5),
        "diag-decay" => OperatorSpec::diagonal(
            vec![],
            MultiplierTail::Geometric {
                amplitude: 1.0,
                ratio: 0.7,
            },
        ),
        "diag-nonexpansive" => OperatorSpec::new(
            OperatorKind::Diagonal {
                multipliers: vec![1.0, -1.0, 0.5],
                tail: MultiplierTail::Constant { value: 1.0 },
            },
            ContractionClass::Nonexpansive,
        ),
        "affine-1d" => OperatorSpec::affine(Matrix::diag(&[0.5]), 0.0, Element::unit(1)),
        "affine-block" => OperatorSpec::affine(
            Matrix::from_rows(vec![vec![0.3, 0.2], vec![-0.1, 0.4]]).ok()?,
            0.2,
            Element::finite(vec![1.0, -1.0]).ok()?,
        ),
        "nilpotent-shift" => OperatorSpec::new(
            OperatorKind::AffineFiniteRank {
                matrix: Matrix::from_rows(vec![vec![0.0, 2.0], vec![0.0, 0.0]]).ok()?,
                gamma: 0.3,
                offset: Element::unit(1),
            },
            ContractionClass::AsymptoticallyContractive { k: 0.3, p_bar: 1 },
        ),
        "tanh-contraction" => OperatorSpec::new(
            OperatorKind::ComponentwiseNonlinear {
                map: ScalarMap::Tanh,
                constant: 0.8,
            },
            ContractionClass::Contractive { k: 0.8 },
        ),
        _ => return None,
    };
    Some(op.expect("shipped operator presets are valid"))
}

/// Basis preset by name.
pub fn basis(name: &str) -> Option<BasisSpec> {
    match name {
        "canonical" => Some(BasisSpec::Canonical),
        "weighted-decay" => Some(
            BasisSpec::weighted(
                vec![],
                WeightTail {
                    amplitude: 1.0,
                    ratio: 0.9,
                },
            )
            .expect("valid weights"),
        ),
        _ => None,
    }
}

/// Element preset by name.
pub fn element(name: &str) -> Option<Element> {
    match name {
        "e1" => Some(Element::unit(1)),
        "geo-half" => Element::geometric(vec![], 2.0, 0.5).ok(),
        "finite-pair" => Element::finite(vec![1.0, -2.0]).ok(),
        "zero" => Some(Element::zero()),
        _ => None,
    }
}

/// Scalar function preset by name.
pub fn function(name: &str) -> Option<ScalarRule> {
    match name {
        "zero" => Some(ScalarRule::Zero),
        "a0-reference" => Some(ScalarRule::Constant { value: 0.4 }),
        "lambda-reciprocal" => Some(ScalarRule::Reciprocal { scale: 0.5 }),
        "phi-one" => Some(ScalarRule::Constant { value: 1.0 }),
        _ => None,
    }
}

/// Delay scenario preset by name.
pub fn delay(name: &str) -> Option<DelayScenario> {
    let reference = DelayScenario {
        a: -1.0,
        a0: ScalarRule::Constant { value: 0.4 },
        lambda_fn: ScalarRule::Reciprocal { scale: 0.5 },
        h: 0.5,
        sample_period: 1.0,
        phi: ScalarRule::Constant { value: 1.0 },
        dt: 1e-3,
        horizon: 40.0,
    };
    match name {
        "delay-reference" => Some(reference),
        "delay-free" => Some(DelayScenario {
            a0: ScalarRule::Zero,
            ..reference
        }),
        _ => None,
    }
}

/// One line per preset.
pub fn listing() -> String {
    let width = PRESETS.iter().map(|p| p.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for p in PRESETS {
        let cat = serde_json::to_value(p.category).expect("serializable");
        let cat = cat.as_str().unwrap_or_default();
        out.push_str(&format!(
            "{:<9} {:<width$}  {}\n",
            cat, p.name, p.description
        ));
    }
    out
}
