use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use roby_core::freealg::cayley_hamilton_check;
use roby_core::linegeom::{is_ulrich_on_embedded_curve, is_ulrich_over_line};
use roby_core::pipeline::{examples, run_traced_with_limit, PipelineSpec};
use roby_core::report::{char_morphism_report, pipeline_report, roby_report, Format, Report, SCHEMA_VERSION};
use roby_core::roby::{char_morphism, form_roby, split_roby, verify_char_morphism, verify_roby, GradedRobyModule};
use roby_core::specfile::{self, AlgebraFile, Config, ModuleFile, MorphismFile, P1ModuleFile, PipelineFile};
use roby_core::surfnum::{
    beta_closed_form, beta_report, beta_sequence, ec_tensor, monad_shape, p1xp1_cohomology, quadric_delta_ulrich_test, quadric_h1_closed_form,
    quadric_h1_sequence, quadric_h1_table, wlp_check, BundleNumerics, UlrichClass,
};
use roby_core::{HomForm, Poly, Var};

#[derive(Parser)]
#[command(name = "roby", version, about = "Roby modules, characteristic morphisms and surface numerics")]
struct Cli {
    /// Optional configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Text => Format::Text,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Characteristic polynomial of an algebra, with a Cayley-Hamilton check.
    Charpoly {
        file: PathBuf,
        /// Restrict with `var=poly` bindings.
        #[arg(long = "bind", value_name = "VAR=POLY")]
        bindings: Vec<String>,
    },
    /// Build or verify graded Roby modules.
    #[command(subcommand)]
    Roby(RobyCmd),
    /// Extract and check the characteristic morphism of a module with T-slot.
    Charmor {
        file: PathBuf,
        /// Treat the file as a stored morphism instead of a module.
        #[arg(long)]
        morphism: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extend a characteristic morphism from a line and check the filtration.
    Pipeline {
        file: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "file")]
        example: Option<Example>,
        #[arg(long)]
        module_out: Option<PathBuf>,
        #[arg(long)]
        morphism_out: Option<PathBuf>,
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Line bundle cohomology on the quadric and splitting types on the line.
    #[command(subcommand)]
    Cohom(CohomCmd),
    /// Monad ranks, Euler characteristics and the β recursion.
    #[command(subcommand)]
    Numerology(NumerologyCmd),
    /// Re-render a stored JSON report.
    Report { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Quadric,
    Trivial,
    Cubic,
}

#[derive(Subcommand)]
enum RobyCmd {
    /// Build a module for a form or a split algebra and verify it.
    Build {
        #[command(flatten)]
        source: BuildSource,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a stored module.
    Verify { file: PathBuf },
}

#[derive(Args)]
struct BuildSource {
    /// Form such as `y1^2 + y2^2`; needs `--args`.
    #[arg(long, requires = "args", conflicts_with = "split", required_unless_present = "split")]
    form: Option<String>,
    #[arg(long, value_delimiter = ',')]
    args: Vec<String>,
    /// Degree of the form, when it cannot be read off a term.
    #[arg(long)]
    degree: Option<u32>,
    /// Rank of a split algebra.
    #[arg(long)]
    split: Option<usize>,
}

#[derive(Subcommand)]
enum CohomCmd {
    /// Cohomology of `O(a, b)` on the quadric surface.
    Bundle {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
    },
    /// `h^1(E_s(-s+k))` for `E_s = O(s, 1-s)`.
    Table {
        s: i64,
        #[arg(long)]
        csv: bool,
    },
    /// `h^1(O(a+i, b+i))` over a range, with the unimodality check.
    Scan {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -8)]
        lo: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 8)]
        hi: i64,
        #[arg(long)]
        csv: bool,
    },
    /// Splitting type of a graded module over `k[x,y]`.
    Splitting {
        file: PathBuf,
        /// Also test for Ulrich on a curve with `O_C(1) = O(e)`.
        #[arg(long)]
        curve_degree: Option<i64>,
    },
}

#[derive(Subcommand)]
enum NumerologyCmd {
    /// Monad shape of a pushforward to the plane.
    Monad {
        #[arg(long)]
        rank: u64,
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        m: u64,
    },
    /// Euler characteristic of a tensor with a bundle trivial on lines.
    Ec {
        #[arg(long, allow_hyphen_values = true)]
        chi: i64,
        #[arg(long)]
        rank_e: i64,
        #[arg(long)]
        rank_f: i64,
    },
    /// The β recursion from `β_0`.
    Beta {
        #[arg(allow_hyphen_values = true)]
        beta0: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Ulrich classification of `O(a, 1-a)` for `|a| ≤ max`.
    Ulrich {
        #[arg(long, default_value_t = 6)]
        max: i64,
    },
}

/// A command either ran its checks (`Ok(passed)`) or could not run.
type Outcome = Result<bool>;

struct Ctx {
    config: Config,
    format: Format,
}

impl Ctx {
    fn out_path(&self, p: &Path) -> PathBuf {
        self.config.resolve(p)
    }

    fn emit(&self, r: &Report, to: Option<&Path>) -> Result<bool> {
        let text = r.render(self.format);
        print!("{text}");
        if let Some(p) = to {
            let p = self.out_path(p);
            write_text(&p, &r.render(Format::Json))?;
        }
        Ok(r.passed)
    }

    fn check_order(&self, e: usize) -> Result<()> {
        if e as u64 > self.config.field_order_cap as u64 {
            bail!("needs a root of unity of order {e}, above the configured cap {}", self.config.field_order_cap);
        }
        Ok(())
    }
}

fn write_text(p: &Path, s: &str) -> Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(p, s).with_context(|| format!("writing {}", p.display()))
}

fn parse_bindings(items: &[String]) -> Result<std::collections::HashMap<Var, Poly>> {
    items
        .iter()
        .map(|b| {
            let (k, v) = b.split_once('=').with_context(|| format!("binding `{b}` is not VAR=POLY"))?;
            if !Var::is_valid_name(k.trim()) {
                bail!("`{}` is not a variable name", k.trim());
            }
            Ok((Var::new(k.trim()), v.parse::<Poly>()?))
        })
        .collect()
}

fn charpoly(ctx: &Ctx, file: &Path, bindings: &[String]) -> Outcome {
    let f: AlgebraFile = specfile::read(file)?;
    let mut alg = f.algebra.build()?;
    if !bindings.is_empty() {
        alg = alg.substitute(&parse_bindings(bindings)?)?;
    }
    let chi = alg.char_poly();
    let ch = cayley_hamilton_check(&alg);
    let mut r = Report::new("charpoly");
    r.input("algebra", file.display());
    if !bindings.is_empty() {
        r.input("bindings", bindings.join(", "));
    }
    r.input("chi", &chi);
    r.dimension("algebra_rank", alg.rank());
    let detail = match &ch.first_nonzero {
        Some((i, j, p)) => format!("entry ({i},{j}) of chi(rho) is {p}"),
        None => "chi(rho) = 0".into(),
    };
    r.check("cayley-hamilton", ch.passed, detail);
    ctx.emit(&r, None)
}

fn roby_build(ctx: &Ctx, src: &BuildSource, output: Option<&Path>) -> Outcome {
    let (m, label): (GradedRobyModule, String) = match (&src.form, src.split) {
        (Some(f), None) => {
            let args = src.args.iter().map(|a| if Var::is_valid_name(a) { Ok(Var::new(a)) } else { Err(anyhow::anyhow!("`{a}` is not a variable name")) }).collect::<Result<Vec<_>>>()?;
            let poly: Poly = f.parse()?;
            let degree = match src.degree {
                Some(e) => e,
                None => poly.terms().next().map(|(m, _)| m.degree_in(&args)).context("zero form needs --degree")?,
            };
            ctx.check_order(degree as usize)?;
            (form_roby(&HomForm::new(poly, degree, args)?)?, format!("form {f}"))
        }
        (None, Some(d)) => {
            if d == 0 {
                bail!("split rank must be positive");
            }
            (split_roby(d), format!("split({d})"))
        }
        _ => bail!("give exactly one of --form or --split"),
    };
    if let Some(p) = output {
        specfile::write(&ctx.out_path(p), &ModuleFile::from_module(&m))?;
    }
    ctx.emit(&roby_report(&label, &m, &verify_roby(&m)), None)
}

fn roby_verify(ctx: &Ctx, file: &Path) -> Outcome {
    let f: ModuleFile = specfile::read(file)?;
    let m = f.build()?;
    ctx.emit(&roby_report(&file.display().to_string(), &m, &verify_roby(&m)), None)
}

fn charmor(ctx: &Ctx, file: &Path, is_morphism: bool, output: Option<&Path>) -> Outcome {
    let c = if is_morphism {
        specfile::read::<MorphismFile>(file)?.build()?
    } else {
        let m = specfile::read::<ModuleFile>(file)?.build()?;
        char_morphism(&m)?
    };
    let rep = verify_char_morphism(&c, &c.algebra().char_poly())?;
    if let Some(p) = output {
        specfile::write(&ctx.out_path(p), &MorphismFile::from_morphism(&c))?;
    }
    ctx.emit(&char_morphism_report(&file.display().to_string(), &c, &rep), None)
}

fn pipeline(ctx: &Ctx, file: Option<&Path>, example: Option<Example>, outs: [Option<&Path>; 3]) -> Outcome {
    let (spec, mut dest): (PipelineSpec, specfile::OutputSpec) = match (file, example) {
        (Some(f), None) => {
            let pf: PipelineFile = specfile::read(f)?;
            (pf.build()?, pf.output)
        }
        (None, Some(Example::Quadric)) => (examples::quadric(), Default::default()),
        (None, Some(Example::Trivial)) => (examples::trivial(), Default::default()),
        (None, Some(Example::Cubic)) => (examples::cubic(), Default::default()),
        _ => bail!("give a pipeline file or --example"),
    };
    let [module_out, morphism_out, report_out] = outs;
    dest.module = module_out.map(Path::to_path_buf).or(dest.module);
    dest.morphism = morphism_out.map(Path::to_path_buf).or(dest.morphism);
    dest.report = report_out.map(Path::to_path_buf).or(dest.report);
    ctx.check_order(spec.algebra.rank())?;

    let (steps, res) = run_traced_with_limit(&spec, ctx.config.max_module_dim);
    let report = pipeline_report(&spec, &steps, &res);
    if let Ok(out) = &res {
        if let Some(p) = &dest.module {
            specfile::write(&ctx.out_path(p), &ModuleFile::from_module(&out.module))?;
        }
        if let Some(p) = &dest.morphism {
            specfile::write(&ctx.out_path(p), &MorphismFile::from_morphism(&out.morphism))?;
        }
    }
    let passed = ctx.emit(&report, dest.report.as_deref())?;
    match res {
        Err(e) if e.is_input_error() => Err(e.into()),
        _ => Ok(passed),
    }
}

fn table(header: &[&str], rows: &[Vec<String>], csv: bool) -> String {
    if csv {
        let mut s = header.join(",") + "\n";
        for r in rows {
            s += &(r.join(",") + "\n");
        }
        return s;
    }
    let widths: Vec<usize> = (0..header.len()).map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0)).collect();
    let line = |cells: Vec<&str>| cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string() + "\n";
    let mut s = line(header.to_vec());
    for r in rows {
        s += &line(r.iter().map(String::as_str).collect());
    }
    s
}

fn cohom(ctx: &Ctx, cmd: &CohomCmd) -> Outcome {
    match cmd {
        CohomCmd::Bundle { a, b } => {
            let c = p1xp1_cohomology(*a, *b);
            let mut r = Report::new("cohom");
            r.input("bundle", format!("O({a}, {b})"));
            r.input("h0", c.h0);
            r.input("h1", c.h1);
            r.input("h2", c.h2);
            r.input("euler", c.euler());
            r.input("class", format!("{:?}", quadric_delta_ulrich_test(*a, *b)));
            r.check("riemann-roch", c.euler() == (a + 1) * (b + 1), format!("chi = (a+1)(b+1) = {}", (a + 1) * (b + 1)));
            ctx.emit(&r, None)
        }
        CohomCmd::Table { s, csv } => {
            if *s < 2 {
                bail!("the table needs s >= 2");
            }
            let t = quadric_h1_table(*s);
            let rows: Vec<Vec<String>> = t.iter().map(|(k, h)| vec![k.to_string(), h.to_string(), quadric_h1_closed_form(*s, *k).to_string()]).collect();
            print!("{}", table(&["k", "h1", "closed_form"], &rows, *csv));
            Ok(t.iter().all(|(k, h)| *h == quadric_h1_closed_form(*s, *k)))
        }
        CohomCmd::Scan { a, b, lo, hi, csv } => {
            if lo > hi {
                bail!("empty range {lo}..{hi}");
            }
            let seq = quadric_h1_sequence(*a, *b, *lo, *hi);
            let rows: Vec<Vec<String>> = seq.iter().map(|(i, h)| vec![i.to_string(), h.to_string()]).collect();
            print!("{}", table(&["i", "h1"], &rows, *csv));
            let w = wlp_check(&seq);
            if !*csv {
                println!("unimodal about -2: {}; peak at -1 or -2: {}", w.passed(), w.peak_at_minus_one_or_two);
            }
            Ok(w.passed())
        }
        CohomCmd::Splitting { file, curve_degree } => {
            let m = specfile::read::<P1ModuleFile>(file)?.build()?;
            let st = m.splitting_type_padded(ctx.config.degree_padding)?;
            let mut r = Report::new("splitting");
            r.input("module", file.display());
            r.input("splitting_type", &st);
            r.dimension("rank", st.rank());
            r.note(format!("trivial: {}", is_ulrich_over_line(&st)));
            if let Some(e) = curve_degree {
                if *e < 1 {
                    bail!("curve degree must be positive");
                }
                r.note(format!("Ulrich on a curve with O(1) of degree {e}: {}", is_ulrich_on_embedded_curve(&st, *e)));
            }
            ctx.emit(&r, None)
        }
    }
}

fn numerology(ctx: &Ctx, cmd: &NumerologyCmd) -> Outcome {
    match cmd {
        NumerologyCmd::Monad { rank, degree, m } => {
            if *rank == 0 || *degree == 0 {
                bail!("rank and degree must be positive");
            }
            let s = monad_shape(&BundleNumerics { rank: *rank, degree: *degree, m: *m, h0: None });
            let mut r = Report::new("monad");
            r.input("numerics", format!("rank {rank}, degree {degree}, m {m}"));
            r.input("shape", format!("O(-1)^{} -> O^{} -> O(1)^{}", s.left, s.middle, s.right));
            r.input("euler", s.euler);
            r.dimension("pushforward_rank", s.middle as usize - s.left as usize - s.right as usize);
            ctx.emit(&r, None)
        }
        NumerologyCmd::Ec { chi, rank_e, rank_f } => {
            if *rank_e < 1 || *rank_f < 1 {
                bail!("ranks must be positive");
            }
            println!("{}", ec_tensor(*chi, *rank_e, *rank_f));
            Ok(true)
        }
        NumerologyCmd::Beta { beta0, steps, csv } => {
            let b0: BigRational = beta0.parse().map_err(|_| anyhow::anyhow!("`{beta0}` is not a rational p/q"))?;
            let seq = beta_sequence(&b0, *steps);
            let rows: Vec<Vec<String>> = seq.iter().enumerate().map(|(m, b)| vec![m.to_string(), b.to_string(), beta_closed_form(&b0, m as u32).to_string()]).collect();
            print!("{}", table(&["m", "beta", "closed_form"], &rows, *csv));
            Ok(beta_report(&b0, *steps).passed())
        }
        NumerologyCmd::Ulrich { max } => {
            let rows: Vec<Vec<String>> = (-max..=*max)
                .map(|a| {
                    let b = 1 - a;
                    let class = match quadric_delta_ulrich_test(a, b) {
                        UlrichClass::Ulrich => "ulrich",
                        UlrichClass::DeltaUlrich => "delta-ulrich",
                        UlrichClass::NotDeltaUlrich => "not delta-ulrich",
                    };
                    vec![a.to_string(), b.to_string(), p1xp1_cohomology(a, b).h0.to_string(), p1xp1_cohomology(a - 1, b - 1).h1.to_string(), class.into()]
                })
                .collect();
            print!("{}", table(&["a", "b", "h0", "m", "class"], &rows, false));
            Ok(true)
        }
    }
}

fn rerender(ctx: &Ctx, file: &Path) -> Outcome {
    let s = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let r: Report = serde_json::from_str(&s).with_context(|| format!("{} is not a JSON report", file.display()))?;
    if r.schema_version != SCHEMA_VERSION {
        bail!("report schema version {} is not supported (expected {SCHEMA_VERSION})", r.schema_version);
    }
    ctx.emit(&r, None)
}

fn dispatch(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(p) => specfile::read(p)?,
        None => Config::default(),
    };
    let ctx = Ctx { config, format: cli.format.into() };
    match &cli.cmd {
        Cmd::Charpoly { file, bindings } => charpoly(&ctx, file, bindings),
        Cmd::Roby(RobyCmd::Build { source, output }) => roby_build(&ctx, source, output.as_deref()),
        Cmd::Roby(RobyCmd::Verify { file }) => roby_verify(&ctx, file),
        Cmd::Charmor { file, morphism, output } => charmor(&ctx, file, *morphism, output.as_deref()),
        Cmd::Pipeline { file, example, module_out, morphism_out, report_out } => {
            pipeline(&ctx, file.as_deref(), *example, [module_out.as_deref(), morphism_out.as_deref(), report_out.as_deref()])
        }
        Cmd::Cohom(c) => cohom(&ctx, c),
        Cmd::Numerology(n) => numerology(&ctx, n),
        Cmd::Report { file } => rerender(&ctx, file),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
