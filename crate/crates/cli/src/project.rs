//! Project file schema and conversion into library objects.
//!
//! Polynomials are written as strings over the variable names of their
//! block; exact constants use `num/den`. Floats appear only in initial
//! conditions and run directives. See `SCHEMA.md`.

use bigiso::port_ham::{Flow, Interconnection, MatrixField, PortHamSystem, ScalarField};
use bigiso::reduction::{GroupAction, MomentumMap, SubmanifoldChart};
use bigiso::sampling::Sampler;
use bigiso::structure::BigIsoStructure;
use bigiso::tensor::{Bivector, OneForm, VectorField};
use bigiso::{Poly, Rational};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port_system: Option<PortSystemBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mechanics: Option<MechanicsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionBlock>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_span: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Project the state back onto the constraint set after each step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureBlock {
    pub variables: Vec<String>,
    /// Spanning one-forms of the cotangent part, as component lists.
    #[serde(default)]
    pub sigma: Vec<Vec<String>>,
    /// Spanning vector fields of the kernel part.
    #[serde(default)]
    pub sprime: Vec<Vec<String>>,
    /// Skew matrix of the bivector; omitted means zero.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pi: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortSystemBlock {
    pub variables: Vec<String>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<String>>,
    /// `n x p` input matrix, rows per state.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<Vec<String>>,
    pub hamiltonian: String,
    /// `n x k` constraint matrix; the constraint forces lie in its columns.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowBlock>,
    pub initial: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlowBlock {
    Zero,
    Constant { values: Vec<f64> },
    /// Interconnection subspace given either as the graph `{(A e, e)}` of a
    /// `p x p` matrix or by spanning vectors `(f_1..f_p, e_1..e_p)`.
    Interconnection {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        graph: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        basis: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsBlock {
    /// `2n` names: positions first, then momenta.
    pub variables: Vec<String>,
    /// Spanning vector fields of the velocity distribution, over the positions.
    pub distribution: Vec<Vec<String>>,
    pub hamiltonian: String,
    pub initial: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionBlock {
    /// Over the variables of the `structure` block.
    pub hamiltonian: String,
    #[serde(default)]
    pub generators: Vec<Vec<String>>,
    /// `c[i][j][k]` with `[xi_i, xi_j] = sum_k c[i][j][k] xi_k`; omitted means abelian.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub structure_constants: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    pub momentum: Vec<String>,
    pub chart: ChartBlock,
    /// Reduced initial condition for the trajectory comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartBlock {
    pub variables: Vec<String>,
    /// Ambient coordinates as polynomials in the chart variables.
    pub embedding: Vec<String>,
    pub quotient_variables: Vec<String>,
    /// Quotient coordinates as polynomials in the chart variables.
    pub quotient: Vec<String>,
    /// Section of the quotient: chart coordinates in the quotient variables.
    pub section: Vec<String>,
    /// Ambient functions vanishing on the submanifold.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub level_set: Vec<String>,
    /// Chart coordinates as ambient polynomials, a left inverse of the embedding.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub retraction: Vec<String>,
}

/// Schema-level problem: bad field shape, unparsable polynomial, missing block.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type SResult<T> = std::result::Result<T, SchemaError>;

fn schema<T>(r: bigiso::Result<T>, ctx: &str) -> SResult<T> {
    r.map_err(|e| SchemaError(format!("{ctx}: {e}")))
}

pub fn parse_project(src: &str) -> SResult<ProjectFile> {
    let p: ProjectFile = toml::from_str(src).map_err(|e| SchemaError(e.to_string()))?;
    if p.schema_version != SCHEMA_VERSION {
        return Err(SchemaError(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            p.schema_version
        )));
    }
    Ok(p)
}

pub fn poly(src: &str, names: &[String], ctx: &str) -> SResult<Poly> {
    schema(Poly::parse(src, names.len(), Some(names)), &format!("{ctx} '{src}'"))
}

fn polys(src: &[String], names: &[String], ctx: &str) -> SResult<Vec<Poly>> {
    src.iter().enumerate().map(|(i, s)| poly(s, names, &format!("{ctx}[{i}]"))).collect()
}

fn matrix(src: &[Vec<String>], names: &[String], rows: usize, cols: Option<usize>, ctx: &str) -> SResult<Vec<Vec<Poly>>> {
    if src.len() != rows {
        return Err(SchemaError(format!("{ctx}: expected {rows} rows, found {}", src.len())));
    }
    let out = src
        .iter()
        .enumerate()
        .map(|(i, r)| polys(r, names, &format!("{ctx}[{i}]")))
        .collect::<SResult<Vec<_>>>()?;
    let width = cols.or_else(|| out.first().map(Vec::len)).unwrap_or(0);
    if let Some((i, r)) = out.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(SchemaError(format!("{ctx}[{i}]: expected {width} entries, found {}", r.len())));
    }
    Ok(out)
}

fn fields(src: &[Vec<String>], names: &[String], ctx: &str) -> SResult<Vec<VectorField>> {
    src.iter()
        .enumerate()
        .map(|(i, r)| {
            let c = polys(r, names, &format!("{ctx}[{i}]"))?;
            check_len(c.len(), names.len(), &format!("{ctx}[{i}]"))?;
            schema(VectorField::new(c), ctx)
        })
        .collect()
}

fn check_len(found: usize, expected: usize, ctx: &str) -> SResult<()> {
    if found != expected {
        return Err(SchemaError(format!("{ctx}: expected {expected} entries, found {found}")));
    }
    Ok(())
}

pub fn rational(src: &str, ctx: &str) -> SResult<Rational> {
    bigiso::rational::parse(src).map_err(|e| SchemaError(format!("{ctx} '{src}': {e}")))
}

impl StructureBlock {
    /// Parsed `(m, sigma, sprime, pi)`; library-level failures such as rank
    /// jumps are left to the caller.
    pub fn parts(&self) -> SResult<(usize, Vec<OneForm>, Vec<VectorField>, Bivector)> {
        let names = &self.variables;
        let m = names.len();
        let sigma = self
            .sigma
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let c = polys(r, names, &format!("structure.sigma[{i}]"))?;
                check_len(c.len(), m, &format!("structure.sigma[{i}]"))?;
                schema(OneForm::new(c), "structure.sigma")
            })
            .collect::<SResult<Vec<_>>>()?;
        let sprime = fields(&self.sprime, names, "structure.sprime")?;
        let pi = if self.pi.is_empty() {
            Bivector::zero(m)
        } else {
            schema(Bivector::from_matrix(&matrix(&self.pi, names, m, Some(m), "structure.pi")?), "structure.pi")?
        };
        Ok((m, sigma, sprime, pi))
    }

    pub fn build(&self, sampler: Sampler) -> SResult<bigiso::Result<BigIsoStructure>> {
        let (m, sigma, sprime, pi) = self.parts()?;
        Ok(BigIsoStructure::with_sampler(m, sigma, sprime, pi, sampler))
    }

    pub fn from_structure(s: &BigIsoStructure, names: &[String]) -> Self {
        let row = |c: &[Poly]| c.iter().map(|p| p.display_with(names)).collect::<Vec<_>>();
        let m = s.dim();
        let pi = s.pi();
        Self {
            variables: names.to_vec(),
            sigma: s.sigma().iter().map(|a| row(a.comps())).collect(),
            sprime: s.sprime().iter().map(|z| row(z.comps())).collect(),
            pi: if pi.is_zero() {
                Vec::new()
            } else {
                (0..m).map(|i| (0..m).map(|j| pi.get(i, j).display_with(names)).collect()).collect()
            },
        }
    }
}

impl PortSystemBlock {
    pub fn build(&self) -> SResult<(PortHamSystem, Flow)> {
        let names = &self.variables;
        let n = names.len();
        let j = matrix(&self.j, names, n, Some(n), "port_system.J")?;
        let g = if self.g.is_empty() {
            vec![Vec::new(); n]
        } else {
            matrix(&self.g, names, n, None, "port_system.g")?
        };
        let p = g.first().map_or(0, Vec::len);
        let h = poly(&self.hamiltonian, names, "port_system.hamiltonian")?;
        let mut sys = schema(
            PortHamSystem::new(
                MatrixField::Poly(j),
                MatrixField::Poly(g),
                MatrixField::zeros(n, 0, n),
                ScalarField::Poly(h),
            ),
            "port_system",
        )?;
        if !self.constraints.is_empty() {
            let b = matrix(&self.constraints, names, n, None, "port_system.constraints")?;
            sys = schema(sys.with_constraints(b), "port_system.constraints")?;
        }
        check_len(self.initial.len(), n, "port_system.initial")?;
        let flow = match &self.flow {
            None | Some(FlowBlock::Zero) => Flow::Zero,
            Some(FlowBlock::Constant { values }) => {
                check_len(values.len(), p, "port_system.flow.values")?;
                Flow::Constant(values.clone())
            }
            Some(FlowBlock::Interconnection { graph, basis }) => {
                let delta = match (graph.is_empty(), basis.is_empty()) {
                    (false, true) => {
                        let a = graph
                            .iter()
                            .enumerate()
                            .map(|(i, r)| r.iter().map(|s| rational(s, &format!("port_system.flow.graph[{i}]"))).collect())
                            .collect::<SResult<Vec<Vec<Rational>>>>()?;
                        if a.len() != p || a.iter().any(|r| r.len() != p) {
                            return Err(SchemaError(format!("port_system.flow.graph: expected a {p} x {p} matrix")));
                        }
                        schema(Interconnection::graph(&a, n), "port_system.flow.graph")?
                    }
                    (true, false) => {
                        let rows = matrix(basis, names, basis.len(), Some(2 * p), "port_system.flow.basis")?;
                        schema(Interconnection::new(p, n, rows), "port_system.flow.basis")?
                    }
                    _ => return Err(SchemaError("port_system.flow: give exactly one of graph, basis".into())),
                };
                Flow::Interconnection(delta)
            }
        };
        Ok((sys, flow))
    }
}

impl MechanicsBlock {
    pub fn build(&self, sampler: Sampler) -> SResult<bigiso::Result<bigiso::mechanics::ConstrainedSystem>> {
        let names = &self.variables;
        if names.len() % 2 != 0 || names.is_empty() {
            return Err(SchemaError("mechanics.variables: expected 2n names".into()));
        }
        let q = &names[..names.len() / 2];
        let l = fields(&self.distribution, q, "mechanics.distribution")?;
        let h = poly(&self.hamiltonian, names, "mechanics.hamiltonian")?;
        check_len(self.initial.len(), names.len(), "mechanics.initial")?;
        Ok(bigiso::mechanics::ConstrainedSystem::with_sampler(l, h, sampler))
    }
}

pub struct ReductionInput {
    pub action: GroupAction,
    pub momentum: MomentumMap,
    pub hamiltonian: Poly,
    pub chart: SubmanifoldChart,
}

impl ReductionBlock {
    pub fn build(&self, names: &[String]) -> SResult<bigiso::Result<ReductionInput>> {
        let m = names.len();
        let gens = fields(&self.generators, names, "reduction.generators")?;
        let r = gens.len();
        let momentum = polys(&self.momentum, names, "reduction.momentum")?;
        check_len(momentum.len(), r, "reduction.momentum")?;
        let hamiltonian = poly(&self.hamiltonian, names, "reduction.hamiltonian")?;
        let c = &self.chart;
        let emb = polys(&c.embedding, &c.variables, "reduction.chart.embedding")?;
        check_len(emb.len(), m, "reduction.chart.embedding")?;
        let quot = polys(&c.quotient, &c.variables, "reduction.chart.quotient")?;
        check_len(quot.len(), c.quotient_variables.len(), "reduction.chart.quotient")?;
        let sec = polys(&c.section, &c.quotient_variables, "reduction.chart.section")?;
        let level = polys(&c.level_set, names, "reduction.chart.level_set")?;
        let retr = polys(&c.retraction, names, "reduction.chart.retraction")?;
        let constants = if self.structure_constants.is_empty() {
            None
        } else {
            let mut out = Vec::new();
            for (i, plane) in self.structure_constants.iter().enumerate() {
                let mut rows = Vec::new();
                for (j, row) in plane.iter().enumerate() {
                    rows.push(
                        row.iter()
                            .map(|s| rational(s, &format!("reduction.structure_constants[{i}][{j}]")))
                            .collect::<SResult<Vec<_>>>()?,
                    );
                }
                out.push(rows);
            }
            Some(out)
        };
        let built = (|| {
            let action = match constants {
                None => GroupAction::abelian(m, gens)?,
                Some(c) => GroupAction::new(m, gens, c)?,
            };
            let mut chart = SubmanifoldChart::new(m, emb)?.with_quotient(quot, sec)?;
            if !level.is_empty() {
                chart = chart.with_level_set(level)?;
            }
            if !retr.is_empty() {
                chart = chart.with_retraction(retr)?;
            }
            Ok(ReductionInput {
                action,
                momentum: MomentumMap { components: momentum },
                hamiltonian,
                chart,
            })
        })();
        Ok(built)
    }
}
