//! Recovers the module/port/instance skeleton from emitted Verilog.

use std::sync::OnceLock;

use regex::Regex;

use crate::rtl::ir::{Dir, RtlModule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortSkeleton {
    pub name: String,
    pub dir: Dir,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSkeleton {
    pub name: String,
    pub ports: Vec<PortSkeleton>,
    /// (module, instance name) pairs in source order.
    pub instances: Vec<(String, String)>,
}

impl ModuleSkeleton {
    pub fn of(module: &RtlModule) -> Self {
        ModuleSkeleton {
            name: module.name.clone(),
            ports: module
                .ports
                .iter()
                .map(|p| PortSkeleton { name: p.name.clone(), dir: p.dir, width: p.width })
                .collect(),
            instances: module.instances.iter().map(|i| (i.module.clone(), i.name.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReparseError {
    pub line: usize,
    pub message: String,
}

fn patterns() -> &'static (Regex, Regex, Regex) {
    static P: OnceLock<(Regex, Regex, Regex)> = OnceLock::new();
    P.get_or_init(|| {
        (
            Regex::new(r"^module (\w+)(\(|;)$").unwrap(),
            Regex::new(r"^  (input|output) (?:\[(\d+):0\] )?(\w+),?$").unwrap(),
            Regex::new(r"^  (\w+) (\w+) \($").unwrap(),
        )
    })
}

/// Line-oriented parse of text produced by [`super::emit_verilog`] or
/// [`super::emit_testbench`].
pub fn reparse(text: &str) -> Result<Vec<ModuleSkeleton>, ReparseError> {
    let (module_re, port_re, inst_re) = patterns();
    let mut out = Vec::new();
    let mut current: Option<ModuleSkeleton> = None;
    let mut in_ports = false;
    for (idx, line) in text.lines().enumerate() {
        let err = |message: &str| ReparseError { line: idx + 1, message: message.to_string() };
        if let Some(caps) = module_re.captures(line) {
            if current.is_some() {
                return Err(err("nested module"));
            }
            current = Some(ModuleSkeleton { name: caps[1].to_string(), ports: Vec::new(), instances: Vec::new() });
            // `module x;` has no port list (testbenches)
            in_ports = &caps[2] == "(";
            continue;
        }
        let Some(module) = current.as_mut() else {
            continue;
        };
        if in_ports {
            if line == ");" {
                in_ports = false;
            } else if let Some(caps) = port_re.captures(line) {
                let dir = if &caps[1] == "input" { Dir::Input } else { Dir::Output };
                let width = match caps.get(2) {
                    Some(hi) => hi.as_str().parse::<u32>().map_err(|_| err("bad port range"))? + 1,
                    None => 1,
                };
                module.ports.push(PortSkeleton { name: caps[3].to_string(), dir, width });
            } else {
                return Err(err("unrecognized port line"));
            }
        } else if line == "endmodule" {
            out.push(current.take().expect("inside module"));
        } else if let Some(caps) = inst_re.captures(line) {
            module.instances.push((caps[1].to_string(), caps[2].to_string()));
        }
    }
    if current.is_some() {
        return Err(ReparseError { line: text.lines().count(), message: "missing endmodule".into() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_karatsuba2, gen_sbm};
    use crate::num::ArithMode;
    use crate::verilog::emit_design;

    #[test]
    fn skeleton_round_trip() {
        for design in [gen_sbm(8, ArithMode::Integer).unwrap(), gen_karatsuba2(33, ArithMode::CarryLess).unwrap()] {
            let art = emit_design(&design).unwrap();
            let expected: Vec<_> = design.modules().unwrap().iter().map(ModuleSkeleton::of).collect();
            assert_eq!(reparse(&art.text).unwrap(), expected);
        }
    }

    #[test]
    fn testbench_skeleton() {
        let design = gen_sbm(8, ArithMode::Integer).unwrap();
        let tb = crate::verilog::emit_testbench(&design.top, crate::verilog::TestbenchOptions::new(3, 1));
        let skel = reparse(&tb.text).unwrap();
        assert_eq!(skel.len(), 1);
        assert_eq!(skel[0].name, "tb_mul_sbm_8");
        assert!(skel[0].ports.is_empty());
        assert_eq!(skel[0].instances, [("mul_sbm_8".to_string(), "dut".to_string())]);
    }

    #[test]
    fn truncated_text_is_rejected() {
        let art = emit_design(&gen_sbm(8, ArithMode::Integer).unwrap()).unwrap();
        let cut = art.text.replace("endmodule\n", "");
        assert!(reparse(&cut).is_err());
    }
}
