use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use effint::gallery::{gallery_item, gallery_list, run_item, scheme_gallery_item, Profile, SuiteReport};
use effint::scheme_io::{load_scheme, save_scheme};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BudgetArg {
    Quick,
    Default,
    Deep,
}

/// Runs the property suites of the gallery.
#[derive(Debug, Parser)]
#[command(name = "effint", version)]
struct Cli {
    /// Gallery item to run; repeat for several. All items when omitted.
    #[arg(long)]
    item: Vec<String>,
    #[arg(long, value_enum, default_value = "default")]
    budget: BudgetArg,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the gallery and exit.
    #[arg(long)]
    list: bool,
    /// Run the suites on an interpretation loaded from a scheme file.
    #[arg(long, value_name = "PATH")]
    scheme: Option<PathBuf>,
    /// Write the scheme of the single `--item` to this file and exit.
    #[arg(long, value_name = "PATH")]
    save_scheme: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("effint: {msg}");
    ExitCode::from(3)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(3);
        }
    };
    if cli.list {
        for name in gallery_list() {
            match gallery_item(name) {
                Ok(it) => println!("{name}\t{}", it.summary),
                Err(e) => return usage(e),
            }
        }
        return ExitCode::SUCCESS;
    }
    if let Some(path) = &cli.save_scheme {
        let [name] = cli.item.as_slice() else {
            return usage("--save-scheme needs exactly one --item");
        };
        let scheme = match gallery_item(name) {
            Ok(it) => it.scheme,
            Err(e) => return usage(e),
        };
        let Some(scheme) = scheme else {
            return usage(format!("{name} has no scheme"));
        };
        return match save_scheme(&scheme, path) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => usage(e),
        };
    }
    let profile = match cli.budget {
        BudgetArg::Quick => Profile::quick(),
        BudgetArg::Default => Profile::standard(),
        BudgetArg::Deep => Profile::deep(),
    };
    let mut items = Vec::new();
    if let Some(path) = &cli.scheme {
        let loaded = load_scheme(path).and_then(|s| scheme_gallery_item(&path.display().to_string(), s));
        match loaded {
            Ok(it) => items.push(it),
            Err(e) => return usage(e),
        }
    }
    let names: Vec<String> = if cli.item.is_empty() && cli.scheme.is_none() {
        gallery_list().into_iter().map(String::from).collect()
    } else {
        cli.item.clone()
    };
    for name in &names {
        match gallery_item(name) {
            Ok(it) => items.push(it),
            Err(e) => return usage(e),
        }
    }
    let mut report = SuiteReport { lines: Vec::new() };
    for it in &items {
        let r = run_item(it, &profile);
        print!("{}", r.text());
        report.lines.extend(r.lines);
    }
    if let Some(first) = report.first_failure() {
        eprintln!("first failure: {first}");
    }
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, report.text()) {
            return usage(format!("cannot write {}: {e}", path.display()));
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
