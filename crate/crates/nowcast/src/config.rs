//! Pipeline configuration: a TOML file with a `[defaults]` table and one
//! `[countries.<code>]` table per country. Every default can be overridden
//! per country; paths are relative to the config file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nowcast_core::forecast::{DmOptions, Loss};
use nowcast_core::series::YearMonth;
use nowcast_core::stationarity::{AdfSpec, KpssSpec};
use nowcast_core::var::{NowcastSpec, WindowScheme};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::ConfigError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub sample_start: Option<String>,
    pub sample_end: Option<String>,
    pub train_end: Option<String>,
    pub forecast_start: Option<String>,
    pub forecast_end: Option<String>,
    pub adf_lags: Option<usize>,
    pub adf_trend: Option<bool>,
    pub kpss_trend: Option<bool>,
    pub kpss_bandwidth: Option<usize>,
    pub hac_bandwidth: Option<usize>,
    pub var_lags: Option<usize>,
    pub select_var_order: Option<bool>,
    pub publication_lag: Option<usize>,
    pub nowcast_max_lag: Option<usize>,
    pub window: Option<String>,
    pub dm_loss: Option<String>,
    pub dm_bandwidth: Option<usize>,
    pub dm_small_sample: Option<bool>,
}

impl Settings {
    fn overlay(&self, over: &Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: over.$f.clone().or_else(|| self.$f.clone())),* } };
        }
        pick!(
            sample_start, sample_end, train_end, forecast_start, forecast_end, adf_lags, adf_trend, kpss_trend,
            kpss_bandwidth, hac_bandwidth, var_lags, select_var_order, publication_lag, nowcast_max_lag, window,
            dm_loss, dm_bandwidth, dm_small_sample
        )
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_true")]
    parallel: bool,
    #[serde(default)]
    defaults: Settings,
    countries: BTreeMap<String, toml::Table>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCountry {
    unemployment: String,
    trends: String,
    #[serde(default)]
    search_terms: Vec<String>,
}

/// Fully resolved settings for one country.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryConfig {
    pub code: String,
    /// Path as written in the config file.
    pub unemployment: String,
    pub trends: String,
    pub unemployment_path: PathBuf,
    pub trends_path: PathBuf,
    pub search_terms: Vec<String>,
    pub sample_start: YearMonth,
    pub sample_end: YearMonth,
    pub train_end: YearMonth,
    pub forecast_start: YearMonth,
    pub forecast_end: YearMonth,
    pub adf: AdfSpec,
    pub kpss: KpssSpec,
    pub hac_bandwidth: Option<usize>,
    pub var_lags: usize,
    pub select_var_order: bool,
    pub nowcast: NowcastSpec,
    pub window: WindowScheme,
    pub dm: DmOptions,
}

impl CountryConfig {
    pub fn forecast_horizon(&self) -> usize {
        self.forecast_start.months_until(self.forecast_end) as usize + 1
    }

    /// Canonical `key = value` listing used in reports and fingerprints.
    pub fn canonical(&self) -> String {
        let opt = |v: Option<usize>| v.map_or_else(|| "auto".to_string(), |b| b.to_string());
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("unemployment", self.unemployment.clone());
        kv("trends", self.trends.clone());
        kv("search_terms", format!("{:?}", self.search_terms));
        kv("sample_start", self.sample_start.to_string());
        kv("sample_end", self.sample_end.to_string());
        kv("train_end", self.train_end.to_string());
        kv("forecast_start", self.forecast_start.to_string());
        kv("forecast_end", self.forecast_end.to_string());
        kv("adf_lags", self.adf.lags.to_string());
        kv("adf_trend", self.adf.trend.to_string());
        kv("kpss_trend", self.kpss.trend.to_string());
        kv("kpss_bandwidth", opt(self.kpss.bandwidth));
        kv("hac_bandwidth", opt(self.hac_bandwidth));
        kv("var_lags", self.var_lags.to_string());
        kv("select_var_order", self.select_var_order.to_string());
        kv("publication_lag", self.nowcast.publication_lag.to_string());
        kv("nowcast_max_lag", self.nowcast.max_lag.to_string());
        kv("window", window_label(self.window).to_string());
        kv("dm_loss", self.dm.loss.label().to_string());
        kv("dm_bandwidth", opt(self.dm.bandwidth));
        kv("dm_small_sample", self.dm.small_sample.to_string());
        s
    }
}

pub fn window_label(w: WindowScheme) -> &'static str {
    match w {
        WindowScheme::Expanding => "expanding",
        WindowScheme::Fixed => "fixed",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub parallel: bool,
    pub countries: Vec<CountryConfig>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ConfigError::Syntax { source, .. } => ConfigError::Syntax { path: path.to_path_buf(), source },
            e => e,
        })
    }

    /// Parses config text; relative data paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|source| ConfigError::Syntax { path: PathBuf::from("<config>"), source })?;
        if raw.countries.is_empty() {
            return Err(invalid("config", "no [countries.<code>] sections"));
        }
        let countries = raw
            .countries
            .into_iter()
            .map(|(code, table)| resolve(&code, table, &raw.defaults, base))
            .collect::<Result<_, _>>()?;
        Ok(Self { parallel: raw.parallel, countries })
    }

    /// Keeps only `code` (case-insensitive).
    pub fn filter(mut self, code: &str) -> Result<Self, ConfigError> {
        self.countries.retain(|c| c.code.eq_ignore_ascii_case(code));
        if self.countries.is_empty() {
            return Err(ConfigError::UnknownCountry(code.to_string()));
        }
        Ok(self)
    }

    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for c in &self.countries {
            let _ = writeln!(s, "[countries.{}]", c.code);
            s.push_str(&c.canonical());
        }
        s
    }

    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn invalid(scope: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { scope: scope.to_string(), message: message.into() }
}

fn resolve(code: &str, mut table: toml::Table, defaults: &Settings, base: &Path) -> Result<CountryConfig, ConfigError> {
    let scope = format!("countries.{code}");
    let mut own = toml::Table::new();
    for key in ["unemployment", "trends", "search_terms"] {
        if let Some(v) = table.remove(key) {
            own.insert(key.to_string(), v);
        }
    }
    let country: RawCountry = own.try_into().map_err(|e: toml::de::Error| invalid(&scope, e.message()))?;
    let over: Settings = table.try_into().map_err(|e: toml::de::Error| invalid(&scope, e.message()))?;
    let s = defaults.overlay(&over);

    let month = |v: &Option<String>, default: (i32, u32), key: &str| -> Result<YearMonth, ConfigError> {
        match v {
            None => Ok(YearMonth::new(default.0, default.1).expect("valid default month")),
            Some(text) => text.parse().map_err(|_| invalid(&scope, format!("{key}: invalid month {text:?}"))),
        }
    };
    let sample_start = month(&s.sample_start, (2004, 1), "sample_start")?;
    let sample_end = month(&s.sample_end, (2013, 12), "sample_end")?;
    let train_end = month(&s.train_end, (2012, 12), "train_end")?;
    let forecast_start = month(&s.forecast_start, (2013, 1), "forecast_start")?;
    let forecast_end = month(&s.forecast_end, (2013, 12), "forecast_end")?;
    if !(sample_start < train_end && train_end < forecast_end && forecast_end <= sample_end) {
        return Err(invalid(&scope, "need sample_start < train_end < forecast_end <= sample_end"));
    }
    if forecast_start != train_end.add_months(1) {
        return Err(invalid(&scope, "forecast_start must be the month after train_end"));
    }

    let positive = |v: Option<usize>, default: usize, key: &str| -> Result<usize, ConfigError> {
        match v.unwrap_or(default) {
            0 => Err(invalid(&scope, format!("{key} must be positive"))),
            n => Ok(n),
        }
    };
    let adf = AdfSpec { lags: s.adf_lags.unwrap_or(3), intercept: true, trend: s.adf_trend.unwrap_or(true) };
    let kpss = KpssSpec { trend: s.kpss_trend.unwrap_or(true), bandwidth: s.kpss_bandwidth };
    let var_lags = positive(s.var_lags, 12, "var_lags")?;
    let nowcast = NowcastSpec {
        publication_lag: positive(s.publication_lag, 3, "publication_lag")?,
        max_lag: positive(s.nowcast_max_lag, 12, "nowcast_max_lag")?,
    };
    if nowcast.publication_lag > nowcast.max_lag {
        return Err(invalid(&scope, "publication_lag must not exceed nowcast_max_lag"));
    }
    let window = match s.window.as_deref().unwrap_or("expanding") {
        "expanding" => WindowScheme::Expanding,
        "fixed" => WindowScheme::Fixed,
        other => return Err(invalid(&scope, format!("window: expected \"expanding\" or \"fixed\", got {other:?}"))),
    };
    let loss = match s.dm_loss.as_deref().unwrap_or("squared") {
        "squared" => Loss::Squared,
        "absolute" => Loss::Absolute,
        other => return Err(invalid(&scope, format!("dm_loss: expected \"squared\" or \"absolute\", got {other:?}"))),
    };
    let dm = DmOptions {
        loss,
        horizon: 1,
        bandwidth: s.dm_bandwidth,
        small_sample: s.dm_small_sample.unwrap_or(false),
    };

    Ok(CountryConfig {
        code: code.to_string(),
        unemployment_path: base.join(&country.unemployment),
        trends_path: base.join(&country.trends),
        unemployment: country.unemployment,
        trends: country.trends,
        search_terms: country.search_terms,
        sample_start,
        sample_end,
        train_end,
        forecast_start,
        forecast_end,
        adf,
        kpss,
        hac_bandwidth: s.hac_bandwidth,
        var_lags,
        select_var_order: s.select_var_order.unwrap_or(false),
        nowcast,
        window,
        dm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[countries.CZ]
unemployment = "cz_ur.csv"
trends = "cz_gi.csv"
search_terms = ["prace", "nabidka prace"]
"#;

    fn ym(y: i32, m: u32) -> YearMonth {
        YearMonth::new(y, m).unwrap()
    }

    #[test]
    fn defaults_resolve() {
        let c = Config::parse(MINIMAL, Path::new("/data")).unwrap();
        assert!(c.parallel);
        let cz = &c.countries[0];
        assert_eq!(cz.unemployment_path, PathBuf::from("/data/cz_ur.csv"));
        assert_eq!((cz.sample_start, cz.sample_end), (ym(2004, 1), ym(2013, 12)));
        assert_eq!(cz.train_end, ym(2012, 12));
        assert_eq!(cz.forecast_horizon(), 12);
        assert_eq!(cz.adf, AdfSpec::default());
        assert_eq!(cz.var_lags, 12);
        assert_eq!(cz.nowcast, NowcastSpec::default());
        assert_eq!(cz.dm, DmOptions::default());
        assert_eq!(cz.window, WindowScheme::Expanding);
    }

    #[test]
    fn country_overrides_defaults() {
        let text = r#"
parallel = false
[defaults]
var_lags = 6
dm_loss = "absolute"
[countries.HU]
unemployment = "hu.csv"
trends = "hu_gi.csv"
var_lags = 4
window = "fixed"
[countries.PL]
unemployment = "pl.csv"
trends = "pl_gi.csv"
"#;
        let c = Config::parse(text, Path::new(".")).unwrap();
        assert!(!c.parallel);
        assert_eq!(c.countries[0].var_lags, 4);
        assert_eq!(c.countries[0].window, WindowScheme::Fixed);
        assert_eq!(c.countries[1].var_lags, 6);
        assert_eq!(c.countries[1].dm.loss, Loss::Absolute);
        assert_eq!(c.clone().filter("pl").unwrap().countries.len(), 1);
        assert!(matches!(c.filter("SK"), Err(ConfigError::UnknownCountry(_))));
    }

    #[test]
    fn rejects_bad_settings() {
        let with = |extra: &str| Config::parse(&format!("{MINIMAL}{extra}\n"), Path::new(".")).unwrap_err();
        assert!(matches!(with("var_lags = 0"), ConfigError::Invalid { .. }));
        assert!(matches!(with("train_end = \"2014-01\""), ConfigError::Invalid { .. }));
        assert!(matches!(with("forecast_start = \"2013-02\""), ConfigError::Invalid { .. }));
        assert!(matches!(with("window = \"rolling\""), ConfigError::Invalid { .. }));
        assert!(matches!(with("sample_end = \"2013-13\""), ConfigError::Invalid { .. }));
        assert!(matches!(with("unknown_key = 1"), ConfigError::Invalid { .. }));
        assert!(matches!(with("publication_lag = 13"), ConfigError::Invalid { .. }));
        assert!(matches!(
            Config::parse("[countries]\n", Path::new(".")).unwrap_err(),
            ConfigError::Invalid { .. }
        ));
        assert!(matches!(Config::parse("parallel = ", Path::new(".")).unwrap_err(), ConfigError::Syntax { .. }));
    }

    #[test]
    fn fingerprint_tracks_resolved_values() {
        let a = Config::parse(MINIMAL, Path::new("/a")).unwrap();
        let b = Config::parse(MINIMAL, Path::new("/b")).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = Config::parse(&format!("{MINIMAL}adf_lags = 4\n"), Path::new("/a")).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }
}
