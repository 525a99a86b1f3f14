use serde::Serialize;
use serde_json::Value;
use uwram::CostCounter;

#[derive(Serialize)]
pub struct Config {
    pub w: u32,
    pub k: usize,
}

#[derive(Serialize)]
pub struct Counters {
    pub wide_alu: u64,
    pub wide_mem: u64,
    pub scalar_alu: u64,
    pub scalar_mem: u64,
    pub wide_total: u64,
}

impl From<CostCounter> for Counters {
    fn from(c: CostCounter) -> Self {
        Counters {
            wide_alu: c.wide_alu,
            wide_mem: c.wide_mem,
            scalar_alu: c.scalar_alu,
            scalar_mem: c.scalar_mem,
            wide_total: c.wide(),
        }
    }
}

/// One line of output.
#[derive(Serialize)]
pub struct RunRecord {
    pub command: String,
    pub config: Config,
    pub input: Value,
    pub answer: Value,
    pub counters: Counters,
    pub check: Option<bool>,
    pub wall_time_ms: f64,
}

impl RunRecord {
    pub fn emit(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string(self).expect("records serialize"));
        } else {
            let check = match self.check {
                Some(true) => " check=pass",
                Some(false) => " check=FAIL",
                None => "",
            };
            println!(
                "{} w={} k={} answer={} wide_ops={} scalar_ops={}{check}",
                self.command,
                self.config.w,
                self.config.k,
                self.answer,
                self.counters.wide_total,
                self.counters.scalar_alu + self.counters.scalar_mem,
            );
        }
    }
}
