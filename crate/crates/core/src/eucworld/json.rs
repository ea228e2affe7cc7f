//! JSON views of elements, divisions and descent traces. Ordinals are strings.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::{DescentTrace, DivisionPath, DivisionResult, RElement, Ring, VarKind};
use crate::polyfactor::VarId;

impl Ring {
    pub fn var_json(&self, v: VarId) -> Value {
        let Some(info) = self.var_info(v) else {
            return Value::Null;
        };
        let kind = match info.kind {
            VarKind::Generator => "generator",
            VarKind::Special => "special",
            VarKind::Z => "z",
        };
        let pair = info.defining_pair.as_ref().map(|(n, d)| {
            json!({ "n": self.display_poly(n), "d": self.display_poly(d) })
        });
        json!({
            "id": v.0,
            "name": self.var_name(v),
            "kind": kind,
            "subs": info.subs.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "stage": info.stage,
            "defining_pair": pair,
            "special_norm": self.special_of_var(v).map(|s| s.norm.to_string()),
        })
    }

    pub fn element_json(&self, r: &RElement) -> Value {
        let vars: BTreeSet<VarId> = r.num.vars().into_iter().chain(r.den.vars()).collect();
        json!({
            "text": self.display(r),
            "num": r.num.to_json(),
            "den": r.den.to_json(),
            "vars": vars.into_iter().map(|v| self.var_json(v)).collect::<Vec<_>>(),
        })
    }

    pub fn division_json(&self, res: &DivisionResult) -> Value {
        let path = match res.path {
            DivisionPath::Exact => "exact",
            DivisionPath::SmallNorm => "small_norm",
            DivisionPath::General => "general",
        };
        let general = res.general.as_ref().map(|g| {
            json!({
                "reduced_num": self.display_poly(&g.reduced_num),
                "reduced_den": self.display_poly(&g.reduced_den),
                "common": self.display_poly(&g.common),
                "special_prime": self.display_poly(&g.special_prime),
                "special_norm": g.special_norm.to_string(),
                "common_norm": g.common_norm.to_string(),
                "extended": g.extended,
            })
        });
        json!({
            "numerator": self.element_json(&res.numerator),
            "divisor": self.element_json(&res.divisor),
            "quotient": self.element_json(&res.quotient),
            "remainder": self.element_json(&res.remainder),
            "divisor_norm": res.divisor_norm.to_string(),
            "remainder_norm": res.remainder_norm.as_ref().map(|o| o.to_string()),
            "adjoined_var": res.adjoined_var.map(|v| v.0),
            "path": path,
            "general": general,
        })
    }

    pub fn trace_json(&self, trace: &DescentTrace) -> Value {
        json!({
            "steps": trace.steps.iter().map(|s| self.division_json(s)).collect::<Vec<_>>(),
            "norms": trace.norms().iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "final_gcd": self.element_json(&trace.final_gcd),
        })
    }
}
