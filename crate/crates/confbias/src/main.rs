//! Command-line front end: run any pipeline stage on JSON inputs, reproduce
//! the headline results, and emit JSON/CSV reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use confbias::bias::{bias_component, effective_bias_report, ConversationSpec};
use confbias::cheaptalk::solve_conversation;
use confbias::conference::{dyadic_conferences, restricted_worth, ConferenceStructure};
use confbias::myerson::myerson_conference;
use confbias::poly::{decimal12, rat, rat_string};
use confbias::scenarios::{
    self, check_threshold, delta_gap, make_star, make_two_star, CheckReport, LinkMode, TwoStarSpec,
};
use confbias::{DeltaValue, Graph, NodeSet, Rat, Result};

#[derive(Parser)]
#[command(
    name = "confbias",
    about = "Conference-restricted Myerson values, effective bias and cheap-talk partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance-polynomial worth of a coalition.
    Worth {
        #[command(flatten)]
        graph: GraphInput,
        /// Coalition as comma-separated node ids; defaults to all nodes.
        #[arg(long)]
        coalition: Option<String>,
        /// Optional link value for numeric evaluation, "p/q" or decimal.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Myerson allocation of the conference-restricted game.
    Myerson {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        structure: StructureInput,
        /// Player set; defaults to all nodes.
        #[arg(long)]
        players: Option<String>,
        #[arg(long)]
        delta: Option<String>,
    },
    /// A single bias component, or the full effective-bias report.
    Bias {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        structure: StructureInput,
        /// Removed player (component mode; pair with --subject).
        #[arg(long, requires = "subject", conflicts_with_all = ["sender", "receiver"])]
        removed: Option<usize>,
        /// Subject player (component mode).
        #[arg(long, requires = "removed")]
        subject: Option<usize>,
        /// Sender (effective-bias mode; pair with --receiver).
        #[arg(long, requires = "receiver")]
        sender: Option<usize>,
        /// Receiver (effective-bias mode).
        #[arg(long, requires = "sender")]
        receiver: Option<usize>,
        /// Conversation conference: "all" or comma-separated ids.
        #[arg(long, default_value = "all")]
        conference: String,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Cheap-talk partition equilibrium of a conversation.
    Equilibrium {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        structure: StructureInput,
        #[arg(long)]
        sender: usize,
        #[arg(long)]
        receiver: usize,
        /// Conversation conference: "all" or comma-separated ids.
        #[arg(long, default_value = "all")]
        conference: String,
        #[arg(long)]
        delta: String,
    },
    /// Build a star or two-star scenario and solve the cross conversation.
    Scenario {
        /// Star leaf count (hub speaks to a leaf).
        #[arg(long, conflicts_with_all = ["k", "l"])]
        star: Option<usize>,
        /// Left-star leaf count of a two-star join.
        #[arg(long, requires = "l")]
        k: Option<usize>,
        /// Right-star leaf count of a two-star join.
        #[arg(long, requires = "k")]
        l: Option<usize>,
        /// Cross-edge placement: hub-hub, hub-leaf or leaf-leaf.
        #[arg(long, default_value = "hub-hub")]
        link_mode: String,
        /// Conversation conference: "all" or the cross "pair".
        #[arg(long, default_value = "all")]
        conference: String,
        #[arg(long)]
        delta: String,
    },
    /// Re-run a named result check; exits zero iff it passes.
    Reproduce {
        /// One of: prop2.1, lemma3.1, prop3.1, prop3.2, prop3.3, prop4.1,
        /// lemma4.1, prop4.2, remark4-exhub.
        prop_id: String,
        /// Restrict parameterized checks to one (k, l) pair.
        #[arg(long, requires = "l")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        l: Option<usize>,
    },
    /// Compare the tree fast path with brute force over all labeled trees.
    TreesCheck {
        #[arg(long)]
        n: usize,
        /// Optional delta at which total worths are also reported.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Emit CSV curve data (delta,value,label) over a delta grid.
    Curve {
        /// One of: beff, gap, count.
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value = "hub-hub")]
        link_mode: String,
        /// Number of interior grid points on (0,1).
        #[arg(long, default_value_t = 99)]
        steps: i64,
    },
}

#[derive(Args)]
struct GraphInput {
    /// Graph JSON file: {"n": 3, "edges": [[0,1],[1,2]]}.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct StructureInput {
    /// Conference-structure JSON file: {"hyperedges": [[0,1],[1,2]]}.
    /// Defaults to the dyadic structure (one conference per edge).
    #[arg(long)]
    structure: Option<PathBuf>,
}

fn io_err(e: std::io::Error, path: &PathBuf) -> String {
    format!("cannot read {}: {e}", path.display())
}

impl GraphInput {
    fn load(&self) -> std::result::Result<Graph, String> {
        let text = std::fs::read_to_string(&self.graph).map_err(|e| io_err(e, &self.graph))?;
        serde_json::from_str(&text).map_err(|e| format!("bad graph file: {e}"))
    }
}

impl StructureInput {
    fn load(&self, g: &Graph) -> std::result::Result<ConferenceStructure, String> {
        match &self.structure {
            None => Ok(dyadic_conferences(g)),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| io_err(e, path))?;
                serde_json::from_str(&text).map_err(|e| format!("bad structure file: {e}"))
            }
        }
    }
}

fn parse_node_list(s: &str) -> std::result::Result<NodeSet, String> {
    let mut set = NodeSet::EMPTY;
    for part in s.split(',') {
        let id: usize = part
            .trim()
            .parse()
            .map_err(|_| format!("bad node id `{part}`"))?;
        if id >= confbias::graph::MAX_NODES {
            return Err(format!("node id {id} too large"));
        }
        set = set.with(id);
    }
    Ok(set)
}

fn parse_conference(s: &str, full: NodeSet) -> std::result::Result<NodeSet, String> {
    if s == "all" {
        Ok(full)
    } else {
        parse_node_list(s)
    }
}

fn poly_json(p: &confbias::DeltaPoly, delta: Option<&DeltaValue>) -> serde_json::Value {
    let mut v = json!({
        "poly": serde_json::to_value(p).unwrap(),
        "display": p.to_string(),
    });
    if let Some(d) = delta {
        let x = p.eval_at(d);
        v["value"] = json!({ "exact": rat_string(&x), "decimal": decimal12(&x) });
    }
    v
}

fn parse_opt_delta(s: &Option<String>) -> Result<Option<DeltaValue>> {
    s.as_deref().map(DeltaValue::parse).transpose()
}

fn report_json(report: &CheckReport) -> serde_json::Value {
    serde_json::to_value(report).unwrap()
}

fn run(cli: Cli) -> std::result::Result<(serde_json::Value, bool), String> {
    match cli.command {
        Command::Worth {
            graph,
            coalition,
            delta,
        } => {
            let g = graph.load()?;
            let s = match coalition {
                Some(list) => parse_node_list(&list)?,
                None => g.full_set(),
            };
            let delta = parse_opt_delta(&delta).map_err(|e| e.to_string())?;
            let worth = g.distance_worth(s).map_err(|e| e.to_string())?;
            Ok((
                json!({ "coalition": s, "worth": poly_json(&worth, delta.as_ref()) }),
                true,
            ))
        }
        Command::Myerson {
            graph,
            structure,
            players,
            delta,
        } => {
            let g = graph.load()?;
            let h = structure.load(&g)?;
            let players = match players {
                Some(list) => parse_node_list(&list)?,
                None => g.full_set(),
            };
            let delta = parse_opt_delta(&delta).map_err(|e| e.to_string())?;
            let mu = myerson_conference(&g, &h, players).map_err(|e| e.to_string())?;
            let total = restricted_worth(&g, &h, players).map_err(|e| e.to_string())?;
            let payoffs: serde_json::Map<String, serde_json::Value> = mu
                .iter()
                .map(|(i, p)| (i.to_string(), poly_json(p, delta.as_ref())))
                .collect();
            Ok((
                json!({
                    "players": players,
                    "payoffs": payoffs,
                    "total_worth": poly_json(&total, delta.as_ref()),
                }),
                true,
            ))
        }
        Command::Bias {
            graph,
            structure,
            removed,
            subject,
            sender,
            receiver,
            conference,
            delta,
        } => {
            let g = graph.load()?;
            let h = structure.load(&g)?;
            let delta = parse_opt_delta(&delta).map_err(|e| e.to_string())?;
            let players = g.full_set();
            match (removed, subject, sender, receiver) {
                (Some(removed), Some(subject), None, None) => {
                    let b = bias_component(&g, &h, players, removed, subject)
                        .map_err(|e| e.to_string())?;
                    Ok((
                        json!({
                            "removed": removed,
                            "subject": subject,
                            "component": poly_json(&b, delta.as_ref()),
                        }),
                        true,
                    ))
                }
                (None, None, Some(s), Some(r)) => {
                    let conf = parse_conference(&conference, players)?;
                    let conv = ConversationSpec::new(conf, s, r).map_err(|e| e.to_string())?;
                    let report =
                        effective_bias_report(&g, &h, players, &conv).map_err(|e| e.to_string())?;
                    let witness_terms: Vec<serde_json::Value> = report
                        .witness_terms
                        .iter()
                        .map(|t| {
                            json!({
                                "witness": t.witness,
                                "sender_witness": poly_json(&t.sender_witness, delta.as_ref()),
                                "witness_receiver": poly_json(&t.witness_receiver, delta.as_ref()),
                            })
                        })
                        .collect();
                    Ok((
                        json!({
                            "sender": s,
                            "receiver": r,
                            "conference": conv.conference,
                            "sender_receiver": poly_json(&report.sender_receiver, delta.as_ref()),
                            "witness_terms": witness_terms,
                            "effective": poly_json(&report.effective, delta.as_ref()),
                        }),
                        true,
                    ))
                }
                _ => Err("pass either --removed/--subject or --sender/--receiver".to_string()),
            }
        }
        Command::Equilibrium {
            graph,
            structure,
            sender,
            receiver,
            conference,
            delta,
        } => {
            let g = graph.load()?;
            let h = structure.load(&g)?;
            let delta = DeltaValue::parse(&delta).map_err(|e| e.to_string())?;
            let players = g.full_set();
            let conf = parse_conference(&conference, players)?;
            let conv = ConversationSpec::new(conf, sender, receiver).map_err(|e| e.to_string())?;
            let eq = solve_conversation(&g, &h, players, &conv, &delta).map_err(|e| e.to_string())?;
            Ok((equilibrium_json(&eq, &delta), true))
        }
        Command::Scenario {
            star,
            k,
            l,
            link_mode,
            conference,
            delta,
        } => {
            let delta = DeltaValue::parse(&delta).map_err(|e| e.to_string())?;
            let (g, h, sender, receiver, family) = match (star, k, l) {
                (Some(k), None, None) => {
                    let s = make_star(k).map_err(|e| e.to_string())?;
                    let (sender, receiver) = (s.hub, s.leaves[0]);
                    (s.graph, s.conferences, sender, receiver, json!({ "star": k }))
                }
                (None, Some(k), Some(l)) => {
                    let mode: LinkMode = link_mode.parse().map_err(|e: confbias::Error| e.to_string())?;
                    let t = make_two_star(&TwoStarSpec { k, l, link_mode: mode })
                        .map_err(|e| e.to_string())?;
                    let (sender, receiver) = (t.sender, t.receiver);
                    (
                        t.graph,
                        t.conferences,
                        sender,
                        receiver,
                        json!({ "two_star": { "k": k, "l": l, "link_mode": link_mode } }),
                    )
                }
                _ => return Err("pass either --star K or --k K --l L".to_string()),
            };
            let conf = match conference.as_str() {
                "all" => g.full_set(),
                "pair" => NodeSet::from_nodes(&[sender, receiver]),
                other => parse_node_list(other)?,
            };
            let conv = ConversationSpec::new(conf, sender, receiver).map_err(|e| e.to_string())?;
            let eq = solve_conversation(&g, &h, g.full_set(), &conv, &delta)
                .map_err(|e| e.to_string())?;
            let mut out = equilibrium_json(&eq, &delta);
            out["scenario"] = family;
            out["graph"] = serde_json::to_value(&g).unwrap();
            Ok((out, true))
        }
        Command::Reproduce { prop_id, k, l } => {
            let pair = k.zip(l);
            let report = reproduce(&prop_id, pair).map_err(|e| e.to_string())?;
            let pass = report.pass;
            Ok((report_json(&report), pass))
        }
        Command::TreesCheck { n, delta } => {
            let delta = parse_opt_delta(&delta).map_err(|e| e.to_string())?;
            let report = scenarios::check_tree_fast_path(n).map_err(|e| e.to_string())?;
            let mut out = report_json(&report);
            if let Some(d) = delta {
                let trees = confbias::graph::enumerate_labeled_trees(n).map_err(|e| e.to_string())?;
                let mut max = None::<Rat>;
                let mut min = None::<Rat>;
                for t in &trees {
                    let v = t
                        .distance_worth(t.full_set())
                        .map_err(|e| e.to_string())?
                        .eval_at(&d);
                    max = Some(max.map_or(v.clone(), |m| m.max(v.clone())));
                    min = Some(min.map_or(v.clone(), |m| m.min(v)));
                }
                out["worth_range"] = json!({
                    "delta": rat_string(d.value()),
                    "min": decimal12(&min.unwrap()),
                    "max": decimal12(&max.unwrap()),
                });
            }
            let pass = report.pass;
            Ok((out, pass))
        }
        Command::Curve {
            curve,
            k,
            l,
            link_mode,
            steps,
        } => {
            let csv = emit_curve(&curve, k, l, &link_mode, steps).map_err(|e| e.to_string())?;
            Ok((serde_json::Value::String(csv), true))
        }
    }
}

fn equilibrium_json(
    eq: &confbias::cheaptalk::PartitionEquilibrium,
    delta: &DeltaValue,
) -> serde_json::Value {
    let mut v = serde_json::to_value(eq).unwrap();
    v["delta"] = json!(rat_string(delta.value()));
    v["bias_value_decimal"] = json!(decimal12(&eq.bias_value));
    v["boundaries_decimal"] = json!(eq.boundaries.iter().map(decimal12).collect::<Vec<_>>());
    v["actions_decimal"] = json!(eq.actions.iter().map(decimal12).collect::<Vec<_>>());
    v
}

fn default_pairs() -> Vec<(usize, usize)> {
    vec![(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 4)]
}

fn reproduce(prop_id: &str, pair: Option<(usize, usize)>) -> Result<CheckReport> {
    let grid = scenarios::delta_grid_tenths();
    let pairs = pair.map(|p| vec![p]).unwrap_or_else(default_pairs);
    match prop_id {
        "prop2.1" => scenarios::check_partition_rule(),
        "lemma3.1" => {
            let mut merged = scenarios::check_star_dominance(3, &grid)?;
            for n in 4..=8 {
                let r = scenarios::check_star_dominance(n, &grid)?;
                merged.cases.extend(r.cases);
                merged.pass &= r.pass;
            }
            Ok(merged)
        }
        "prop3.1" => scenarios::check_single_witness(&grid),
        "prop3.2" => scenarios::check_sender_hub(8),
        "prop3.3" => check_threshold("witness_hub_0.6"),
        "prop4.1" => scenarios::check_two_star_flip(&pairs),
        "lemma4.1" => {
            scenarios::check_worth_comparison(4, &[rat(1, 20), rat(1, 2), rat(19, 20)])
        }
        "prop4.2" => check_threshold("leafleaf_delta_c"),
        "remark4-exhub" => scenarios::check_exhub_remark(),
        other => Err(confbias::Error::UnknownClosedForm(other.to_string())),
    }
}

fn emit_curve(curve: &str, k: usize, l: usize, link_mode: &str, steps: i64) -> Result<String> {
    use std::fmt::Write as _;
    if steps < 1 {
        return Err(confbias::Error::ParamOutOfRange(
            "curve needs at least one grid point".into(),
        ));
    }
    let mode: LinkMode = link_mode.parse()?;
    let mut out = String::from("delta,value,label\n");
    let grid: Vec<Rat> = (1..=steps).map(|i| rat(i, steps + 1)).collect();
    match curve {
        "beff" => {
            let t = make_two_star(&TwoStarSpec { k, l, link_mode: mode })?;
            let beff = scenarios::beff_full_conference(&t.graph, &t.conferences, t.sender, t.receiver)?;
            for d in &grid {
                writeln!(out, "{},{},beff", decimal12(d), decimal12(&beff.eval(d))).unwrap();
            }
        }
        "gap" => {
            let gap = delta_gap(k, l)?;
            for d in &grid {
                writeln!(out, "{},{},gap", decimal12(d), decimal12(&gap.eval(d))).unwrap();
            }
        }
        "count" => {
            let t = make_two_star(&TwoStarSpec { k, l, link_mode: mode })?;
            let beff = scenarios::beff_full_conference(&t.graph, &t.conferences, t.sender, t.receiver)?;
            for d in &grid {
                let n = confbias::cheaptalk::partition_count(&beff.eval(d))?;
                writeln!(out, "{},{n},count", decimal12(d)).unwrap();
            }
        }
        other => {
            return Err(confbias::Error::ParamOutOfRange(format!(
                "unknown curve `{other}` (expected beff, gap or count)"
            )))
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((serde_json::Value::String(csv), true)) => {
            // curve output is plain CSV
            print!("{csv}");
            ExitCode::SUCCESS
        }
        Ok((value, pass)) => {
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(message) => {
            println!("{}", serde_json::to_string_pretty(&json!({ "error": message })).unwrap());
            ExitCode::FAILURE
        }
    }
}
