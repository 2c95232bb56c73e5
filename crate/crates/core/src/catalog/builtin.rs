use super::{AnsatzRecord, CatalogEntry, ParamDecl, ReducedRecord, SolutionRecord, SubalgebraRecord};
use crate::liealg::ParamDomain;

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn param_decls(gens: &[&str]) -> Vec<ParamDecl> {
    let text = gens.join(" ");
    let mut out = Vec::new();
    for (name, domain) in [
        ("alpha", ParamDomain::Real),
        ("beta", ParamDomain::Real),
        ("gamma", ParamDomain::Real),
        ("eps", ParamDomain::Sign),
        ("epsp", ParamDomain::Sign),
        ("epz", ParamDomain::Ternary),
    ] {
        let hit = text
            .match_indices(name)
            .any(|(i, _)| !text[i + name.len()..].starts_with(|c: char| c.is_ascii_alphanumeric()));
        if hit {
            out.push(ParamDecl { name: name.into(), domain });
        }
    }
    out
}

fn subalgebra(gens: &[&str]) -> SubalgebraRecord {
    SubalgebraRecord { generators: strings(gens), params: param_decls(gens) }
}

fn solution(a: &str, b: &str, c: &str, params: &[&str]) -> SolutionRecord {
    SolutionRecord { a: a.into(), b: b.into(), c: c.into(), params: strings(params) }
}

const ONE_DIM: [&str; 13] = [
    "X7",
    "X1 + alpha*X7",
    "X2 + alpha*X7",
    "X6 + alpha*X7",
    "eps*X1 + X6 + alpha*X7",
    "X5 + alpha*X6 + beta*X7",
    "eps*X2 + X5 + alpha*X6 + beta*X7",
    "X4 + alpha*X5 + beta*X6 + gamma*X7",
    "eps*X1 + X4 + alpha*X5 + beta*X6 + gamma*X7",
    "X3 + alpha*X5 + beta*X6 + gamma*X7",
    "eps*X2 + X3 + alpha*X5 + beta*X6 + gamma*X7",
    "X3 + eps*X4 + alpha*X5 + beta*X6 + gamma*X7",
    "eps*X2 + X3 + epsp*X4 + alpha*X5 + beta*X6 + gamma*X7",
];

/// `(family, index, generators)`; named `A{index}_{family}`.
const TWO_DIM: [(u8, u8, [&str; 2]); 54] = [
    (1, 1, ["X1", "X3 + alpha*X6 + beta*X7"]),
    (1, 2, ["X1", "X2 + alpha*X5 + beta*X7"]),
    (1, 3, ["X1", "X5 + alpha*X7"]),
    (1, 4, ["X1", "X3 + epz*X5 + X6 + alpha*X7"]),
    (1, 5, ["X1", "X2 + alpha*X3 + beta*X7"]),
    (1, 6, ["X1", "X6 + alpha*X7"]),
    (1, 7, ["X1", "X7"]),
    (2, 1, ["X2", "X3 + alpha*X6 + beta*X7"]),
    (2, 2, ["X2", "X1 + epz*X4 + beta*X7"]),
    (2, 3, ["X2", "X4 + alpha*X7"]),
    (2, 4, ["X2", "X3 + epz*X4 + X6 + alpha*X7"]),
    (2, 5, ["X2", "X1 + X6 + alpha*X7"]),
    (2, 6, ["X2", "X6 + alpha*X7"]),
    (2, 7, ["X2", "X7"]),
    (3, 1, ["X6", "X3 + alpha*X7"]),
    (3, 2, ["X6", "X4"]),
    (3, 3, ["X6", "X5"]),
    (3, 4, ["X6", "X1 + alpha*X7"]),
    (3, 5, ["X6", "X2"]),
    (3, 6, ["X6", "X7"]),
    (4, 1, ["eps*X1 + X6", "X2"]),
    (4, 2, ["eps*X1 + X6", "X5"]),
    (4, 3, ["eps*X1 + X6", "X7"]),
    (5, 1, ["X5", "X3 + alpha*X6 + beta*X7"]),
    (5, 2, ["X5", "X1 + alpha*X6 + beta*X7"]),
    (5, 3, ["X5", "X6 + alpha*X7"]),
    (5, 4, ["X5", "X7"]),
    (6, 1, ["eps*X2 + X5", "X3 + 1/2*X6 + alpha*X7"]),
    (6, 2, ["eps*X2 + X5", "X1 + alpha*X7"]),
    (6, 3, ["eps*X2 + X5", "X7"]),
    (7, 1, ["X4", "X3 + alpha*X6 + beta*X7"]),
    (7, 2, ["X4", "X2 + alpha*X3 + beta*X7"]),
    (7, 3, ["X4", "X6 + alpha*X7"]),
    (7, 4, ["X4", "X7"]),
    (8, 1, ["eps*X1 + X4", "X3 + 2*X6 + alpha*X7"]),
    (8, 2, ["eps*X1 + X4", "X2 + alpha*X7"]),
    (8, 3, ["eps*X1 + X4", "X7"]),
    (9, 1, ["X3", "X2 + alpha*X7"]),
    (9, 2, ["X3", "X5"]),
    (9, 3, ["X3", "X1"]),
    (9, 4, ["X3", "X6 + alpha*X7"]),
    (9, 5, ["X3", "X7"]),
    (9, 6, ["X3", "X4"]),
    (10, 1, ["eps*X2 + X3", "X1"]),
    (10, 2, ["eps*X2 + X3", "X4"]),
    (10, 3, ["eps*X2 + X3", "X7"]),
    (10, 4, ["X2", "X3 + alpha*X7"]),
    (11, 1, ["X3 + eps*X4", "eps*X5 + X6 - 2*X7"]),
    (11, 2, ["X3 + eps*X4", "X2 + alpha*X7"]),
    (11, 3, ["X3 + eps*X4", "X7"]),
    (11, 4, ["X3 + eps*X4", "X3 + X6 + alpha*X7"]),
    (11, 5, ["X3 + eps*X4", "X1 + eps*X2"]),
    (12, 1, ["eps*X2 + X3 + epsp*X4", "X1 + epsp*X2"]),
    (12, 2, ["eps*X2 + X3 + epsp*X4", "X7"]),
];

const TRANSLATION_SCALING: [&str; 2] = ["X1", "X7"];

fn translation_scaling_ansatz() -> AnsatzRecord {
    AnsatzRecord {
        a: "a".into(),
        b: "a*f(t)".into(),
        c: "a*g(t)".into(),
        variable: "t".into(),
        arbitrary: strings(&["a"]),
    }
}

const REDUCED: [&str; 6] = [
    "a_11 - a_22*f(t) - 2*a_2*f_2(t) - a*f_22(t)",
    "a_12*f(t) + a_1*f_2(t) + a_11*g(t)",
    "a_12 + a_22*g(t) + 2*a_2*g_2(t) + a*g_22(t)",
    "a_2^2*f(t) + a_2*a*f_2(t) - (a_2*g(t) + a*g_2(t))^2 + a*a_12*g(t) + a*a_22*f(t)",
    "a_1*a_2*f(t) - a_1*a_2*g(t)^2 - 2*a*a_1*g(t)*g_2(t) - a*a_12*g(t)^2 - a*a_22*f(t)*g(t) - 2*a*a_2*f(t)*g_2(t) - a^2*f(t)*g_22(t)",
    "a_1^2*f(t) - 2*a*a_1*f(t)*g_2(t) - a_1^2*g(t)^2 + a*a_11*f(t) + 3*a*a_1*g(t)*f_2(t) + a*a_12*f(t)*g(t)",
];

const CONSISTENCY: [&str; 4] = [
    "a^2*f_22(t) + a*a_2*f_2(t) + a^2*g_2(t)^2 - a_2^2*f(t) + a_2^2*g(t)^2 + 2*a*a_2*g(t)*g_2(t)",
    "a_1",
    "a*a_22*f(t) + a_2^2*f(t) - 2*a*a_2*g(t)*g_2(t) + a*a_2*f_2(t) - a^2*g_2(t)^2 - a_2^2*g(t)^2",
    "a^2*f(t)*g_22(t) - a*a_2*f_2(t)*g(t) + a^2*g(t)*g_2(t)^2 - a_2^2*f(t)*g(t) + a_2^2*g(t)^3 + 2*a*a_2*g_2(t)*g(t)^2 + 2*a*a_2*f(t)*g_2(t)",
];

const INEQUATIONS: [&str; 4] = ["f(t)", "g(t)", "a", "f(t) - g(t)^2"];

const REDUCED_FAMILIES: [[&str; 3]; 4] = [
    ["c3*t + c4", "c2", "c1"],
    ["(c1*c3^2*t + c5)/(c1*t + c2)", "c3 + c1*c4/(c1*t + c2)", "c1*t + c2"],
    ["c5*(t + c2)/(ln(t + c2) - c3*c1)", "c4/(ln(t + c2) - c3*c1)", "-ln(t + c2)/c1 + c3"],
    [
        "c6^2*(t + c2)/((c1*ln(t + c2) + c3*t + c4)*c3)",
        "(c5 + c6*t)/(c1*ln(t + c2) + c3*t + c4)",
        "c1*ln(t + c2) + c3*t + c4",
    ],
];

const PIS_FAMILIES: [[&str; 3]; 4] = [
    ["c1", "c1*(c3*t + c4)", "c1*c2"],
    ["c1*t + c2", "c1*c3^2*t + c5", "c3*(c1*t + c2) + c1*c4"],
    ["-ln(t + c2)/c1 + c3", "c5*(t + c2)", "c4"],
    ["c1*ln(t + c2) + c3*t + c4", "c6^2*(t + c2)/c3", "c5 + c6*t"],
];

const PIS_PARAMS: [&[&str]; 4] = [
    &["c1", "c2", "c3", "c4"],
    &["c1", "c2", "c3", "c4", "c5"],
    &["c1", "c2", "c3", "c4", "c5"],
    &["c1", "c2", "c3", "c4", "c5", "c6"],
];

const INVARIANT_SOLUTIONS: [[&str; 3]; 3] = [
    ["0", "0", "0"],
    ["0", "c1*exp(beta/alpha*x)", "0"],
    [
        "c2*exp(c1*t + beta/alpha*x)",
        "-c2*beta/(c1*alpha)*exp(c1*t + beta/alpha*x)",
        "-c1*c2*alpha/beta*exp(c1*t + beta/alpha*x)",
    ],
];

// Cube root of c1/c2 appears throughout the logarithmic corrections.
const ROOT: &str = "(c1/c2)^(1/3)";

fn log_correction(var: &str) -> String {
    format!(
        "{var}*(c4 + c5)*(ln(({var} + {ROOT})^2) - ln({var}^2 - {var}*{ROOT} + (c1/c2)^(2/3)) \
         + 2*sqrt(3)*atan(2*c2*{var}/(sqrt(3)*c1)*(c1/c2)^(2/3) - 1/sqrt(3)))"
    )
}

const PRODUCT_SOLUTION: [&str; 3] =
    ["4*(t + c1)/(c2*x + c3)^2", "4*c2^2*(t + c1)^3/(c2*x + c3)^4", "4*c2*(t + c1)^2/(c2*x + c3)^3"];

fn table_rows() -> Vec<CatalogEntry> {
    let mut rows = Vec::new();

    let mut r1 = CatalogEntry::new("table1.row1", "non-reducible partially invariant solution of <X2, X7>");
    r1.subalgebra = Some(subalgebra(&["X2", "X7"]));
    r1.invariants = strings(&["x", "b/a", "c/a"]);
    r1.ansatz = Some(AnsatzRecord {
        a: "a".into(),
        b: "a*f(x)".into(),
        c: "a*g(x)".into(),
        variable: "x".into(),
        arbitrary: strings(&["a"]),
    });
    r1.solutions = vec![solution(
        "c1*x + c2",
        "c1*c3^2*x + (c5/c1 - c3^2*c2)*ln(c1*x + c2) + c6",
        "c3*(c1*x + c2) + c1*c4",
        &["c1", "c2", "c3", "c4", "c5", "c6"],
    )];
    r1.defect = Some(1);
    rows.push(r1);

    let mut r2 = CatalogEntry::new("table1.row2", "non-reducible partially invariant solution of <X5, X7>");
    r2.subalgebra = Some(subalgebra(&["X5", "X7"]));
    r2.invariants = strings(&["t", "(c^2 - b*a)/b^2", "(b*x - c*t)/b"]);
    r2.ansatz = Some(AnsatzRecord {
        a: "b*(x - g(t))^2/t^2 - b*f(t)".into(),
        b: "b".into(),
        c: "b*(x - g(t))/t".into(),
        variable: "t".into(),
        arbitrary: strings(&["b"]),
    });
    let a2 = format!("(c1 + c2*t^3)*(x - c3)^2/t^3 - {}", log_correction("t"));
    r2.solutions =
        vec![solution(&a2, "(c1 + c2*t^3)/t", "(c1 + c2*t^3)*(x - c3)/t^2", &["c1", "c2", "c3", "c4", "c5"])];
    r2.defect = Some(1);
    rows.push(r2);

    let mut r3 = CatalogEntry::new("table1.row3", "non-reducible partially invariant solution of <X2, X6 + X7>");
    r3.subalgebra = Some(subalgebra(&["X2", "X6 + X7"]));
    r3.invariants = strings(&["x", "b/a^3", "c/a^2"]);
    r3.ansatz = Some(AnsatzRecord {
        a: "a".into(),
        b: "a^3*f(x)".into(),
        c: "a^2*g(x)".into(),
        variable: "x".into(),
        arbitrary: strings(&["a"]),
    });
    r3.solutions = vec![solution(PRODUCT_SOLUTION[0], PRODUCT_SOLUTION[1], PRODUCT_SOLUTION[2], &["c1", "c2", "c3"])];
    r3.defect = Some(1);
    rows.push(r3);

    let mut r4 = CatalogEntry::new("table1.row4", "non-reducible partially invariant solution of <X4, X7>");
    r4.subalgebra = Some(subalgebra(&["X4", "X7"]));
    r4.invariants = strings(&["x", "(c*x - a*t)/(x*a)", "(a*t^2 - 2*x*t*c + b*x^2)/(x^2*a)"]);
    r4.ansatz = Some(AnsatzRecord {
        a: "a".into(),
        b: "a*(g(x) + 2*t/x*f(x) + t^2/x^2)".into(),
        c: "a*(f(x) + t/x)".into(),
        variable: "x".into(),
        arbitrary: strings(&["a"]),
    });
    let b4 = format!("(c1 + c2*x^3)*(t + c3)^2/x^3 + {}", log_correction("x"));
    r4.solutions =
        vec![solution("(c1 + c2*x^3)/x", &b4, "(c1 + c2*x^3)*(t + c3)/x^2", &["c1", "c2", "c3", "c4", "c5"])];
    r4.defect = Some(1);
    rows.push(r4);
    rows
}

/// Every shipped entry, in a fixed order.
pub fn builtin() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for (i, g) in ONE_DIM.iter().enumerate() {
        let mut e = CatalogEntry::new(&format!("onedim.{}", i + 1), "optimal system of one-dimensional subalgebras");
        e.subalgebra = Some(subalgebra(&[g]));
        out.push(e);
    }
    for (family, index, gens) in TWO_DIM {
        let mut e = CatalogEntry::new(
            &format!("twodim.A{index}_{family}"),
            &format!("optimal system of two-dimensional subalgebras, family {family}"),
        );
        e.subalgebra = Some(subalgebra(&gens));
        out.push(e);
    }

    let mut pipeline = CatalogEntry::new("a71.pipeline", "reduction of the system under <X1, X7>");
    pipeline.subalgebra = Some(subalgebra(&TRANSLATION_SCALING));
    pipeline.invariants = strings(&["t", "b/a", "c/a"]);
    pipeline.ansatz = Some(translation_scaling_ansatz());
    pipeline.reduced = strings(&REDUCED);
    pipeline.consistency = strings(&CONSISTENCY);
    pipeline.inequations = strings(&INEQUATIONS);
    pipeline.reduced_solutions = REDUCED_FAMILIES
        .iter()
        .zip(PIS_PARAMS)
        .map(|([f, g, a], p)| ReducedRecord {
            f: f.to_string(),
            g: g.to_string(),
            a: a.to_string(),
            params: strings(p),
        })
        .collect();
    pipeline.defect = Some(1);
    out.push(pipeline);

    for (i, ([a, b, c], p)) in PIS_FAMILIES.iter().zip(PIS_PARAMS).enumerate() {
        let mut e = CatalogEntry::new(
            &format!("eq25.family{}", i + 1),
            &format!("partially invariant solution of <X1, X7>, family {}", i + 1),
        );
        e.subalgebra = Some(subalgebra(&TRANSLATION_SCALING));
        e.invariants = strings(&["t", "b/a", "c/a"]);
        e.ansatz = Some(translation_scaling_ansatz());
        e.solutions = vec![solution(a, b, c, p)];
        e.defect = Some(1);
        out.push(e);
    }

    let params: [&[&str]; 3] = [&[], &["c1", "alpha", "beta"], &["c1", "c2", "alpha", "beta"]];
    for (i, ([a, b, c], p)) in INVARIANT_SOLUTIONS.iter().zip(params).enumerate() {
        let mut e = CatalogEntry::new(
            &format!("eq26.family{}", i + 1),
            &format!("invariant solution of alpha*X1 + beta*X7, family {}", i + 1),
        );
        e.subalgebra = Some(subalgebra(&["alpha*X1 + beta*X7"]));
        e.solutions = vec![solution(a, b, c, p)];
        out.push(e);
    }

    out.extend(table_rows());

    let mut product = CatalogEntry::new("eq27", "Einstein Walker metric from the <X2, X6 + X7> solution");
    product.subalgebra = Some(subalgebra(&["X2", "X6 + X7"]));
    product.solutions =
        vec![solution(PRODUCT_SOLUTION[0], PRODUCT_SOLUTION[1], PRODUCT_SOLUTION[2], &["c1", "c2", "c3"])];
    product.defect = Some(1);
    out.push(product);
    out
}
