//! Orchestrated verification flows over one configuration (p, m, n, r, torus
//! shape): the norm-1 and degree checks for every generic character, the
//! Mackey and reciprocity cross-checks, the three-way comparison of the
//! genericity conditions at r = 2, and the structural sanity suite. The test
//! suite and the command-line tool both drive these.

use crate::chars::{genericity_report, torus_order_at_level, GenericityReport, LevelData, TorusChars};
use crate::clfun::{
    as_integer, double_cosets, induce, inner_product, inner_product_numeric, mackey_data,
    mackey_inner_product, mackey_inner_product_numeric, restricted_inner_product,
    restricted_inner_product_numeric, ClassFunction, MackeyData, Subgroup,
};
use crate::cyclo::CycloValue;
use crate::error::{LabError, Result};
use crate::perm::Perm;
use crate::torus::TorusTable;
use crate::twistgroup::{closed_form_order, GroupSpec};
use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// One lab configuration. `lens` is the torus shape as Weyl cycle lengths.
#[derive(Debug, Clone, Serialize)]
pub struct LabConfig {
    pub p: u32,
    pub m: u32,
    pub n: usize,
    pub r: u32,
    pub lens: Vec<usize>,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl LabConfig {
    pub fn new(p: u32, m: u32, n: usize, r: u32, lens: &[usize]) -> LabConfig {
        LabConfig { p, m, n, r, lens: lens.to_vec(), cache_dir: None }
    }

    pub fn coxeter(p: u32, m: u32, n: usize, r: u32) -> LabConfig {
        Self::new(p, m, n, r, &[n])
    }

    pub fn cache_dir(mut self, dir: Option<&Path>) -> LabConfig {
        self.cache_dir = dir.map(Path::to_path_buf);
        self
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }

    fn perm(&self) -> Perm {
        Perm::block_cycles(&self.lens)
    }

    pub fn build_group(&self) -> Result<Arc<GroupSpec>> {
        GroupSpec::build(self.p, self.m, self.n, self.r, self.perm(), self.cache_dir.as_deref())
    }

    fn build_group_at_level(&self, level: u32) -> Result<Arc<GroupSpec>> {
        GroupSpec::build(self.p, self.m, self.n, level, self.perm(), self.cache_dir.as_deref())
    }
}

/// The shared lab objects for one configuration at even r.
pub struct Lab {
    pub config: LabConfig,
    pub group: Arc<GroupSpec>,
    pub torus: Arc<TorusTable>,
    pub tc: TorusChars,
    pub level: LevelData,
    pub group_l: Arc<GroupSpec>,
    pub tu: Subgroup,
    pub norm_sets: Vec<((usize, usize), BTreeSet<u32>)>,
    pub weyl: Vec<Perm>,
}

impl Lab {
    pub fn build(config: LabConfig) -> Result<Lab> {
        let group = config.build_group()?;
        let torus = Arc::new(TorusTable::build(group.clone()));
        let tc = TorusChars::build(torus.clone());
        let level = LevelData::new(group.clone())?;
        let group_l = config.build_group_at_level(level.l())?;
        let tu = Subgroup::from_keys(group.tu_keys(level.l()));
        let norm_sets = torus.root_norm_indices(1)?;
        let weyl = torus.weyl_elements();
        Ok(Lab { config, group, torus, tc, level, group_l, tu, norm_sets, weyl })
    }

    pub fn genericity(&self, theta: u32) -> Result<GenericityReport> {
        genericity_report(&self.tc, &self.level, &self.group_l, &self.norm_sets, &self.weyl, theta)
    }

    /// Values of the lifted character on the induction subgroup, aligned
    /// with the subgroup's sorted keys.
    fn theta_memo(&self, theta: u32) -> Vec<CycloValue> {
        self.tu
            .keys()
            .iter()
            .map(|&k| self.tc.extended_value(theta, k).expect("congruence diagonal element"))
            .collect()
    }

    fn memo_fn<'a>(&'a self, memo: &'a [CycloValue]) -> impl Fn(u64) -> CycloValue + 'a {
        move |key| memo[self.tu.position(key).expect("induction subgroup member")].clone()
    }

    fn memo_fn_numeric<'a>(&'a self, memo: &'a [Complex64]) -> impl Fn(u64) -> Complex64 + 'a {
        move |key| memo[self.tu.position(key).expect("induction subgroup member")]
    }

    pub fn induce_theta(&self, theta: u32) -> ClassFunction {
        let memo = self.theta_memo(theta);
        let ind = induce(&self.group, &self.tu, &self.memo_fn(&memo));
        ind
    }
}

/// Outcome for one generic character.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaRow {
    pub theta: u32,
    pub norm: i128,
    pub degree: i128,
    pub norm_one: bool,
    pub degree_matches: bool,
    pub mackey_agrees: bool,
    pub reciprocity_agrees: bool,
    /// Cross pair against the next generic character.
    pub cross_theta: u32,
    pub cross_direct: i128,
    pub cross_mackey_agrees: bool,
    pub cross_reciprocity_agrees: bool,
    pub dual_residual: Option<f64>,
}

#[derive(Serialize)]
pub struct MainReport {
    pub config: LabConfig,
    pub q: u64,
    pub group_order: u64,
    pub torus_order: u64,
    pub tu_order: u64,
    pub degree_expected: u128,
    pub theta_count: u64,
    pub generic_thetas: Vec<u32>,
    pub rows: Vec<ThetaRow>,
    pub all_norm_one: bool,
    pub all_degree_match: bool,
    pub all_oracles_agree: bool,
    pub max_dual_residual: Option<f64>,
}

/// The norm-1, degree, Mackey, and reciprocity verification over every
/// generic character of the configuration. `dual_mode` adds the floating
/// route for each pairing and reports the worst residual.
pub fn verify_main(config: LabConfig, dual_mode: bool) -> Result<MainReport> {
    verify_main_selected(config, None, dual_mode)
}

/// Like `verify_main`, but over an explicit character selection. Non-generic
/// ids are allowed; their rows fail the norm-1 flag honestly.
pub fn verify_main_selected(
    config: LabConfig,
    selector: Option<&[u32]>,
    dual_mode: bool,
) -> Result<MainReport> {
    let lab = Lab::build(config)?;
    let q = lab.group.q();
    let l = lab.level.l();

    let degree_expected = closed_form_order(q as u128, lab.config.n as u32, l)
        / torus_order_at_level(q, &lab.config.lens, l) as u128;
    let index = lab.group.order() as u128 / lab.tu.order() as u128;
    assert_eq!(index, degree_expected, "the induction index equals the level-l quotient ratio");

    let count = lab.tc.count() as u32;
    let generic_thetas: Vec<u32> = (0..count)
        .map(|t| lab.genericity(t).map(|rep| (t, rep.is_generic())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|(t, g)| g.then_some(t))
        .collect();

    let selected: Vec<u32> = match selector {
        Some(ids) => {
            if let Some(&bad) = ids.iter().find(|&&t| t >= count) {
                return Err(LabError::Unsupported(format!(
                    "character id {} out of range (torus has {})",
                    bad, count
                )));
            }
            ids.to_vec()
        }
        None => generic_thetas.clone(),
    };

    // Class partition and double cosets once, before the rows fan out.
    lab.group.conjugacy_classes();
    let dc = double_cosets(&lab.group, &lab.tu, &lab.tu);
    let md = mackey_data(&lab.group, &dc, &lab.tu, &lab.tu);

    let rows: Vec<ThetaRow> = selected
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let cross_theta = selected[(i + 1) % selected.len()];
            theta_row(&lab, &md, theta, cross_theta, degree_expected, dual_mode)
        })
        .collect::<Result<_>>()?;

    let all_norm_one = rows.iter().all(|r| r.norm_one);
    let all_degree_match = rows.iter().all(|r| r.degree_matches);
    let all_oracles_agree = rows.iter().all(|r| {
        r.mackey_agrees && r.reciprocity_agrees && r.cross_mackey_agrees && r.cross_reciprocity_agrees
    });
    let max_dual_residual = rows.iter().filter_map(|r| r.dual_residual).fold(None, |acc: Option<f64>, x| {
        Some(acc.map_or(x, |a| a.max(x)))
    });

    Ok(MainReport {
        q: lab.group.q(),
        group_order: lab.group.order(),
        torus_order: lab.torus.order(),
        tu_order: lab.tu.order(),
        degree_expected,
        theta_count: lab.tc.count(),
        generic_thetas,
        rows,
        all_norm_one,
        all_degree_match,
        all_oracles_agree,
        max_dual_residual,
        config: lab.config,
    })
}

fn theta_row(
    lab: &Lab,
    md: &MackeyData,
    theta: u32,
    cross_theta: u32,
    degree_expected: u128,
    dual_mode: bool,
) -> Result<ThetaRow> {
    let memo = lab.theta_memo(theta);
    let cross_memo = lab.theta_memo(cross_theta);
    let chi = lab.memo_fn(&memo);
    let chi_cross = lab.memo_fn(&cross_memo);
    let ind = induce(&lab.group, &lab.tu, &chi);
    let ind_cross = induce(&lab.group, &lab.tu, &chi_cross);

    let degree = as_integer(&ind.degree())?;
    let norm_value = inner_product(&ind, &ind);
    let norm = as_integer(&norm_value)?;
    let mackey = as_integer(&mackey_inner_product(md, &chi, &chi))?;
    let recip_rhs = restricted_inner_product(&lab.tu, &chi, &ind);

    let cross_lhs = inner_product(&ind, &ind_cross);
    let cross_direct = as_integer(&cross_lhs)?;
    let cross_mackey = as_integer(&mackey_inner_product(md, &chi, &chi_cross))?;
    let cross_rhs = restricted_inner_product(&lab.tu, &chi, &ind_cross);

    let dual_residual = if dual_mode {
        let mut worst: f64 = 0.0;
        let memo_c: Vec<Complex64> = memo.iter().map(CycloValue::eval_complex).collect();
        let cross_c: Vec<Complex64> = cross_memo.iter().map(CycloValue::eval_complex).collect();
        let chi_c = lab.memo_fn_numeric(&memo_c);
        let cross_fn_c = lab.memo_fn_numeric(&cross_c);
        let checks = [
            (inner_product_numeric(&ind, &ind), norm as f64),
            (mackey_inner_product_numeric(md, &chi_c, &chi_c), mackey as f64),
            (
                restricted_inner_product_numeric(&lab.tu, &chi_c, &ind),
                recip_rhs.eval_complex().re,
            ),
            (inner_product_numeric(&ind, &ind_cross), cross_direct as f64),
            (mackey_inner_product_numeric(md, &chi_c, &cross_fn_c), cross_mackey as f64),
            (
                restricted_inner_product_numeric(&lab.tu, &chi_c, &ind_cross),
                cross_rhs.eval_complex().re,
            ),
        ];
        for (numeric, exact) in checks {
            worst = worst.max((numeric - Complex64::new(exact, 0.0)).norm());
        }
        Some(worst)
    } else {
        None
    };

    Ok(ThetaRow {
        theta,
        norm,
        degree,
        norm_one: norm == 1,
        degree_matches: degree as u128 == degree_expected,
        mackey_agrees: mackey == norm,
        reciprocity_agrees: norm_value == recip_rhs,
        cross_theta,
        cross_direct,
        cross_mackey_agrees: cross_mackey == cross_direct,
        cross_reciprocity_agrees: cross_lhs == cross_rhs,
        dual_residual,
    })
}

/// Oracle comparison for one character, generic or not.
#[derive(Serialize)]
pub struct MackeyCheckRow {
    pub theta: u32,
    pub generic: bool,
    pub direct: i128,
    pub mackey: i128,
    pub mackey_agrees: bool,
    pub reciprocity_agrees: bool,
    pub dual_residual: Option<f64>,
}

#[derive(Serialize)]
pub struct MackeyCheckReport {
    pub config: LabConfig,
    pub rows: Vec<MackeyCheckRow>,
    pub all_agree: bool,
}

/// Compare the direct self-pairing of each induced character against the
/// double-coset sum and reciprocity. `thetas = None` takes every generic
/// character; explicit ids may include non-generic ones.
pub fn mackey_check(
    config: LabConfig,
    thetas: Option<&[u32]>,
    dual_mode: bool,
) -> Result<MackeyCheckReport> {
    let lab = Lab::build(config)?;
    let count = lab.tc.count() as u32;

    let chosen: Vec<u32> = match thetas {
        Some(ids) => {
            if let Some(&bad) = ids.iter().find(|&&t| t >= count) {
                return Err(LabError::Unsupported(format!(
                    "character id {} out of range (torus has {})",
                    bad, count
                )));
            }
            ids.to_vec()
        }
        None => (0..count)
            .map(|t| lab.genericity(t).map(|rep| (t, rep.is_generic())))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter_map(|(t, g)| g.then_some(t))
            .collect(),
    };

    lab.group.conjugacy_classes();
    let dc = double_cosets(&lab.group, &lab.tu, &lab.tu);
    let md = mackey_data(&lab.group, &dc, &lab.tu, &lab.tu);

    let rows: Vec<MackeyCheckRow> = chosen
        .par_iter()
        .map(|&theta| {
            let generic = lab.genericity(theta)?.is_generic();
            let memo = lab.theta_memo(theta);
            let chi = lab.memo_fn(&memo);
            let ind = induce(&lab.group, &lab.tu, &chi);

            let direct_value = inner_product(&ind, &ind);
            let direct = as_integer(&direct_value)?;
            let mackey = as_integer(&mackey_inner_product(&md, &chi, &chi))?;
            let recip_rhs = restricted_inner_product(&lab.tu, &chi, &ind);

            let dual_residual = if dual_mode {
                let memo_c: Vec<Complex64> = memo.iter().map(CycloValue::eval_complex).collect();
                let chi_c = lab.memo_fn_numeric(&memo_c);
                let checks = [
                    (inner_product_numeric(&ind, &ind), direct as f64),
                    (mackey_inner_product_numeric(&md, &chi_c, &chi_c), mackey as f64),
                    (
                        restricted_inner_product_numeric(&lab.tu, &chi_c, &ind),
                        recip_rhs.eval_complex().re,
                    ),
                ];
                let mut worst: f64 = 0.0;
                for (numeric, exact) in checks {
                    worst = worst.max((numeric - Complex64::new(exact, 0.0)).norm());
                }
                Some(worst)
            } else {
                None
            };

            Ok(MackeyCheckRow {
                theta,
                generic,
                direct,
                mackey,
                mackey_agrees: mackey == direct,
                reciprocity_agrees: direct_value == recip_rhs,
                dual_residual,
            })
        })
        .collect::<Result<_>>()?;

    let all_agree = rows.iter().all(|r| r.mackey_agrees && r.reciprocity_agrees);
    Ok(MackeyCheckReport { config: lab.config, rows, all_agree })
}

/// The three genericity conditions compared exhaustively at r = 2.
#[derive(Serialize)]
pub struct ConditionsReport {
    pub config: LabConfig,
    pub theta_count: u64,
    pub regular: Vec<u32>,
    pub general_position: Vec<u32>,
    pub stabilizer: Vec<u32>,
    pub stabilizer_equals_regular: bool,
    pub regular_subset_general_position: bool,
}

/// Compare {stabilizer} against {regular} and {general position} over every
/// character of the configuration's torus.
pub fn compare_conditions(config: LabConfig) -> Result<ConditionsReport> {
    let lab = Lab::build(config)?;
    let mut regular = Vec::new();
    let mut general_position = Vec::new();
    let mut stabilizer = Vec::new();
    for theta in 0..lab.tc.count() as u32 {
        let rep = lab.genericity(theta)?;
        if rep.regular {
            regular.push(theta);
        }
        if rep.general_position {
            general_position.push(theta);
        }
        if rep.stabilizer {
            stabilizer.push(theta);
        }
    }
    let stabilizer_equals_regular = stabilizer == regular;
    let gp: BTreeSet<u32> = general_position.iter().copied().collect();
    let regular_subset_general_position = regular.iter().all(|t| gp.contains(t));
    Ok(ConditionsReport {
        theta_count: lab.tc.count(),
        regular,
        general_position,
        stabilizer,
        stabilizer_equals_regular,
        regular_subset_general_position,
        config: lab.config,
    })
}

/// Structural sanity across one configuration.
#[derive(Serialize)]
pub struct StructuralReport {
    pub config: LabConfig,
    pub order_closed_form: u128,
    pub order_enumerated: u64,
    pub order_matches: bool,
    pub kernel_order_matches: bool,
    pub kernel_additive: bool,
    pub tu_is_torus_times_kernel: Option<bool>,
    pub dual_count_matches: bool,
    pub orthogonality_pairs_checked: usize,
    pub orthogonality_holds: bool,
}

/// Verify the closed-form order, the abelian additive kernel at level l,
/// optionally TU = T * kernel by double enumeration, the dual count, and
/// character orthogonality (exhaustive for small tori, strided otherwise).
pub fn structural_checks(config: LabConfig, check_tu_product: bool) -> Result<StructuralReport> {
    let lab = Lab::build(config)?;
    let group = &lab.group;
    let ring = group.ring();
    let l = lab.level.l();

    let order_closed_form = closed_form_order(group.q() as u128, group.n() as u32, group.r());
    let order_enumerated = group.order();
    let order_matches = order_closed_form == order_enumerated as u128;

    // Kernel keys at level l and the additive model: products match
    // coefficient sums, which also forces the kernel to be abelian.
    let kernel = group.level_kernel_keys(l);
    let expected: u128 = (group.q() as u128).pow((l as usize * group.n() * group.n()) as u32);
    let kernel_order_matches = kernel.len() as u128 == expected;
    let xs: Vec<_> = kernel.iter().map(|&k| lab.level.shift_down(&group.decode(k))).collect();
    let cap = 600usize;
    let stride = (kernel.len() / cap).max(1);
    let mut kernel_additive = true;
    for a in (0..kernel.len()).step_by(stride) {
        for b in (0..kernel.len()).step_by(stride) {
            let prod = group.mul_keys(kernel[a], kernel[b]);
            let mut sum = group.mat_id();
            for (e, (&xa, &xb)) in sum.iter_mut().zip(xs[a].iter().zip(&xs[b])) {
                *e = ring.add(*e, ring.pi_shift(ring.add(xa, xb), l));
            }
            kernel_additive &= prod == group.encode(&sum);
        }
    }

    let tu_is_torus_times_kernel = check_tu_product.then(|| {
        let mut products = BTreeSet::new();
        for idx in 0..lab.torus.order() as u32 {
            let t = lab.torus.key_of(idx);
            for &k in &kernel {
                products.insert(group.mul_keys(t, k));
            }
        }
        products.iter().copied().eq(lab.tu.keys().iter().copied())
    });

    let dual_count_matches = lab.tc.count() == lab.torus.order();

    // Orthogonality of torus characters: sum over the torus of one character
    // against the conjugate of another is 0 or |T|.
    let t_order = lab.torus.order() as u32;
    let theta_stride = (t_order as usize / 48).max(1);
    let thetas: Vec<u32> = (0..t_order).step_by(theta_stride).collect();
    let mut orthogonality_holds = true;
    let mut pairs = 0usize;
    for &t1 in &thetas {
        for &t2 in &thetas {
            let mut acc = CycloValue::zero();
            for point in 0..t_order {
                acc = acc.add(&lab.tc.value(t1, point).mul(&lab.tc.value(t2, point).conj()));
            }
            let expected = if t1 == t2 { t_order as i128 } else { 0 };
            orthogonality_holds &= as_integer(&acc).map(|v| v == expected).unwrap_or(false);
            pairs += 1;
        }
    }

    Ok(StructuralReport {
        order_closed_form,
        order_enumerated,
        order_matches,
        kernel_order_matches,
        kernel_additive,
        tu_is_torus_times_kernel,
        dual_count_matches,
        orthogonality_pairs_checked: pairs,
        orthogonality_holds,
        config: lab.config,
    })
}
