use anyhow::bail;
use shadowkit::bowen::BowenConfig;
use shadowkit::bracket::{
    check_associativity, check_f_invariance, check_hyperbolic, check_identity_axiom, check_uniform_contraction,
};
use shadowkit::generate::random_point;
use shadowkit::suite::{
    cat_bowen, certified_runs, coordinate_shift_dichotomy, coordinate_shift_witness, expect_failure, ns_bowen,
    ns_start, odometer_exact_hit, shift_bracket_laws, stability_suite,
};
use shadowkit::systems::cat::{CatBracket, CatMap, CAT_GAMMA};
use shadowkit::systems::north_south::{NorthSouth, NsBracket};
use shadowkit::systems::odometer::Odometer;
use shadowkit::systems::sequence::{Alphabet, Base, CircleBase, SequenceSystem, ShiftBracket};
use shadowkit::verify::ns_counterexample;
use shadowkit::{
    Bracket, BowenMethod, CatOracle, CheckReport, Coordinates, PseudoOrbit, Projection, Sampler, Sampling,
    ShadowingMethod, ShiftCanonical,
};

use crate::config::{MethodId, RunConfig, SystemId};

type Certify<S> = Box<dyn Fn(&S, &[PseudoOrbit<<S as shadowkit::MetricSystem>::Point>]) -> Vec<CheckReport> + Sync>;

/// A shadowing method chosen on the command line, with the Bowen
/// configuration behind it when there is one.
pub struct Method<S: CliSystem> {
    pub inner: Box<dyn ShadowingMethod<S> + Sync>,
    pub bowen: Option<BowenConfig>,
    certify: Option<Certify<S>>,
}

impl<S: CliSystem> Method<S> {
    fn plain(inner: impl ShadowingMethod<S> + Sync + 'static) -> Self {
        Method { inner: Box::new(inner), bowen: None, certify: None }
    }

    fn bowen<B>(m: BowenMethod<B>) -> Self
    where
        B: Bracket<S> + Clone + Send + Sync + 'static,
    {
        let cfg = m.cfg;
        let runner = m.clone();
        Method {
            inner: Box::new(m),
            bowen: Some(cfg),
            certify: Some(Box::new(move |sys: &S, cases: &[PseudoOrbit<S::Point>]| {
                let (env, stage) = certified_runs(sys, &runner, cases);
                vec![env, stage]
            })),
        }
    }

    /// Envelope and stage reports over `cases`, for Bowen methods.
    pub fn certify(&self, sys: &S, cases: &[PseudoOrbit<S::Point>]) -> Option<Vec<CheckReport>> {
        self.certify.as_ref().map(|f| f(sys, cases))
    }
}

fn bowen_family<S, B>(id: MethodId, bracket: B, base: BowenConfig, assert_lemmas: bool) -> Method<S>
where
    S: CliSystem,
    B: Bracket<S> + Clone + Send + Sync + 'static,
{
    let cfg = BowenConfig { assert_lemmas, ..base };
    Method::bowen(BowenMethod { bracket, cfg, symmetric: id == MethodId::SymmetricBowen })
}

fn unsupported<T>(sys: &impl shadowkit::MetricSystem, id: MethodId) -> anyhow::Result<T> {
    bail!("method {id} is not available on system {}", sys.id())
}

/// What the command line needs from a system beyond the library traits.
pub trait CliSystem: Coordinates<Point: Send + Sync> + Sampling + Sync + Sized + 'static {
    fn start(&self, seed: u64) -> Self::Point {
        random_point(self, seed)
    }

    fn method(&self, id: MethodId, assert_lemmas: bool) -> anyhow::Result<Method<Self>>;

    fn bracket_axioms(&self, _sampler: &Sampler) -> Option<Vec<CheckReport>> {
        None
    }

    fn counterexamples(&self, _cfg: &RunConfig, _method: &Method<Self>) -> anyhow::Result<Option<Vec<CheckReport>>> {
        Ok(None)
    }

    fn stability(&self, _cfg: &RunConfig) -> Option<Vec<CheckReport>> {
        None
    }

    /// Whether `method` commutes with the shift and with `f` here, so that
    /// the invariance suites are mandatory.
    fn invariant(&self, _method: MethodId) -> bool {
        false
    }
}

impl CliSystem for CatMap {
    fn method(&self, id: MethodId, assert_lemmas: bool) -> anyhow::Result<Method<Self>> {
        Ok(match id {
            MethodId::Bowen | MethodId::SymmetricBowen => {
                bowen_family(id, CatBracket, cat_bowen(self).cfg, assert_lemmas)
            }
            MethodId::Oracle => Method::plain(CatOracle),
            MethodId::Projection => Method::plain(Projection { gamma: CAT_GAMMA }),
            MethodId::ShiftCanonical => return unsupported(self, id),
        })
    }

    fn bracket_axioms(&self, sampler: &Sampler) -> Option<Vec<CheckReport>> {
        Some(vec![
            check_identity_axiom(&CatBracket, self, sampler),
            check_associativity(&CatBracket, self, sampler),
            check_f_invariance(&CatBracket, self, sampler),
            check_hyperbolic(&CatBracket, self, sampler, 30),
            check_uniform_contraction(&CatBracket, self, 1e-3, sampler, 40),
        ])
    }

    fn stability(&self, cfg: &RunConfig) -> Option<Vec<CheckReport>> {
        Some(stability_suite(self, cfg.stability.grid, cfg.stability.eps, cfg.window, cfg.tolerances.oracle))
    }

    fn invariant(&self, method: MethodId) -> bool {
        method != MethodId::Projection
    }
}

impl CliSystem for NorthSouth {
    fn start(&self, seed: u64) -> Self::Point {
        ns_start(self, seed)
    }

    fn method(&self, id: MethodId, assert_lemmas: bool) -> anyhow::Result<Method<Self>> {
        Ok(match id {
            MethodId::Bowen | MethodId::SymmetricBowen => {
                bowen_family(id, NsBracket::new(self), ns_bowen(self).cfg, assert_lemmas)
            }
            MethodId::Projection => Method::plain(Projection { gamma: self.delta() }),
            MethodId::Oracle | MethodId::ShiftCanonical => return unsupported(self, id),
        })
    }

    fn bracket_axioms(&self, sampler: &Sampler) -> Option<Vec<CheckReport>> {
        let b = NsBracket::new(self);
        Some(vec![
            check_identity_axiom(&b, self, sampler),
            check_hyperbolic(&b, self, sampler, 80),
            expect_failure(check_f_invariance(&b, self, sampler)),
        ])
    }

    fn counterexamples(&self, _cfg: &RunConfig, method: &Method<Self>) -> anyhow::Result<Option<Vec<CheckReport>>> {
        Ok(Some(vec![ns_counterexample(self, &&*method.inner, 64, 100.0)]))
    }
}

fn shift_method<B: Base + Send + Sync + 'static>(
    sys: &SequenceSystem<B>,
    id: MethodId,
    assert_lemmas: bool,
) -> anyhow::Result<Method<SequenceSystem<B>>>
where
    SequenceSystem<B>: CliSystem,
{
    Ok(match id {
        MethodId::Bowen | MethodId::SymmetricBowen => {
            let cfg = BowenConfig::for_bracket(sys, &ShiftBracket)?;
            bowen_family(id, ShiftBracket, cfg, assert_lemmas)
        }
        MethodId::ShiftCanonical => Method::plain(ShiftCanonical),
        MethodId::Projection => Method::plain(Projection { gamma: f64::INFINITY }),
        MethodId::Oracle => return unsupported(sys, id),
    })
}

fn shift_axioms<B: Base>(sys: &SequenceSystem<B>, sampler: &Sampler) -> Vec<CheckReport> {
    vec![
        check_identity_axiom(&ShiftBracket, sys, sampler),
        check_associativity(&ShiftBracket, sys, sampler),
        check_hyperbolic(&ShiftBracket, sys, sampler, 20),
        shift_bracket_laws(sys, sampler, 1e-12),
    ]
}

impl CliSystem for SequenceSystem<Alphabet> {
    fn method(&self, id: MethodId, assert_lemmas: bool) -> anyhow::Result<Method<Self>> {
        shift_method(self, id, assert_lemmas)
    }

    fn bracket_axioms(&self, sampler: &Sampler) -> Option<Vec<CheckReport>> {
        Some(shift_axioms(self, sampler))
    }

    fn counterexamples(&self, cfg: &RunConfig, _method: &Method<Self>) -> anyhow::Result<Option<Vec<CheckReport>>> {
        Ok(Some(vec![coordinate_shift_witness(), coordinate_shift_dichotomy(cfg.seed)]))
    }

    fn invariant(&self, method: MethodId) -> bool {
        method == MethodId::ShiftCanonical
    }
}

impl CliSystem for SequenceSystem<CircleBase> {
    fn method(&self, id: MethodId, assert_lemmas: bool) -> anyhow::Result<Method<Self>> {
        shift_method(self, id, assert_lemmas)
    }

    fn bracket_axioms(&self, sampler: &Sampler) -> Option<Vec<CheckReport>> {
        Some(shift_axioms(self, sampler))
    }

    fn counterexamples(&self, cfg: &RunConfig, _method: &Method<Self>) -> anyhow::Result<Option<Vec<CheckReport>>> {
        Ok(Some(vec![coordinate_shift_dichotomy(cfg.seed)]))
    }

    fn invariant(&self, method: MethodId) -> bool {
        method == MethodId::ShiftCanonical
    }
}

impl CliSystem for Odometer {
    fn method(&self, id: MethodId, _assert_lemmas: bool) -> anyhow::Result<Method<Self>> {
        match id {
            MethodId::Projection => Ok(Method::plain(Projection { gamma: 1.0 })),
            _ => unsupported(self, id),
        }
    }

    fn counterexamples(&self, cfg: &RunConfig, _method: &Method<Self>) -> anyhow::Result<Option<Vec<CheckReport>>> {
        let top = (self.digits() as i32).min(7);
        Ok(Some(vec![odometer_exact_hit(self.digits(), 1..=top, cfg.runs, cfg.window)?]))
    }

    fn invariant(&self, method: MethodId) -> bool {
        method == MethodId::Projection
    }
}

/// Runs `$body` with `$sys` bound to the system named by `$id`.
#[macro_export]
macro_rules! with_system {
    ($id:expr, $sys:ident => $body:expr) => {{
        use shadowkit::systems::sequence::{Alphabet, CircleBase, SequenceSystem};
        match $id {
            $crate::config::SystemId::Cat => {
                let $sys = shadowkit::suite::cat_system();
                $body
            }
            $crate::config::SystemId::NsCircle => {
                let $sys = shadowkit::suite::ns_system();
                $body
            }
            $crate::config::SystemId::Shift(k) => {
                let $sys = SequenceSystem::new(Alphabet { k }, 8);
                $body
            }
            $crate::config::SystemId::ShiftCircle => {
                let $sys = SequenceSystem::new(CircleBase, 8);
                $body
            }
            $crate::config::SystemId::Odometer(d) => {
                let $sys = shadowkit::systems::odometer::Odometer::new(d)?;
                $body
            }
        }
    }};
}

pub fn default_method(id: SystemId) -> MethodId {
    match id {
        SystemId::Cat => MethodId::Bowen,
        SystemId::NsCircle => MethodId::SymmetricBowen,
        SystemId::Shift(_) | SystemId::ShiftCircle => MethodId::ShiftCanonical,
        SystemId::Odometer(_) => MethodId::Projection,
    }
}
