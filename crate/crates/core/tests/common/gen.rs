//! Random small programs: one production class with inter-calling methods
//! and one JUnit test, together with the facts needed by the oracles.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FIELDS: [&str; 3] = ["x", "y", "z"];
pub const METHODS: usize = 5;

pub struct Program {
    pub box_src: String,
    pub test_src: String,
    /// Direct calls of `m{i}` to other `m{j}`.
    pub calls: Vec<BTreeSet<usize>>,
    /// Fields written / read directly by `m{i}`.
    pub writes: Vec<BTreeSet<usize>>,
    pub reads: Vec<BTreeSet<usize>>,
    pub statements: usize,
    pub branches: usize,
}

fn getter(f: &str) -> String {
    format!("get{}", f.to_uppercase())
}

fn production(rng: &mut ChaCha8Rng) -> (String, Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>) {
    let mut src = String::from("package g;\n\npublic class Box {\n");
    for f in FIELDS {
        src.push_str(&format!("    private int {f};\n"));
    }
    let mut calls = vec![BTreeSet::new(); METHODS];
    let mut writes = vec![BTreeSet::new(); METHODS];
    let mut reads = vec![BTreeSet::new(); METHODS];
    for i in 0..METHODS {
        src.push_str(&format!("    public void m{i}(int v) {{\n"));
        for k in 0..rng.gen_range(1..=3) {
            match rng.gen_range(0..3) {
                0 => {
                    let f = rng.gen_range(0..FIELDS.len());
                    writes[i].insert(f);
                    src.push_str(&format!("        {} = v;\n", FIELDS[f]));
                }
                1 => {
                    let f = rng.gen_range(0..FIELDS.len());
                    reads[i].insert(f);
                    src.push_str(&format!("        int t{k} = {};\n", FIELDS[f]));
                }
                _ => {
                    let j = rng.gen_range(0..METHODS);
                    calls[i].insert(j);
                    src.push_str(&format!("        m{j}(v);\n"));
                }
            }
        }
        src.push_str("    }\n");
    }
    for f in FIELDS {
        src.push_str(&format!("    public int {}() {{ return {f}; }}\n", getter(f)));
    }
    src.push_str("}\n");
    (src, calls, writes, reads)
}

fn call(rng: &mut ChaCha8Rng, objs: &[&str]) -> String {
    format!("{}.m{}({});", objs.choose(rng).unwrap(), rng.gen_range(0..METHODS), rng.gen_range(0..9))
}

fn assertion(rng: &mut ChaCha8Rng, objs: &[&str]) -> String {
    let f = FIELDS.choose(rng).unwrap();
    format!("assertEquals({}, {}.{}());", rng.gen_range(0..9), objs.choose(rng).unwrap(), getter(f))
}

/// A program whose test has at most 12 statements and at most 2 branching
/// statements.
pub fn generate(rng: &mut ChaCha8Rng) -> Program {
    let (box_src, calls, writes, reads) = production(rng);
    let mut body: Vec<String> = vec!["Box b0 = new Box();".into(), "Box b1 = new Box();".into()];
    let mut count = 2;
    let mut branches = 0;
    let objs = ["b0", "b1"];
    let target = rng.gen_range(4..=12);
    let mut aliased = false;
    while count < target - 1 {
        match rng.gen_range(0..10) {
            0..=3 => {
                body.push(call(rng, &objs));
                count += 1;
            }
            4 | 5 => {
                body.push(assertion(rng, &objs));
                count += 1;
            }
            6 if !aliased && count + 2 < target => {
                body.push("Box b2 = b0;".into());
                body.push(call(rng, &["b2"]));
                aliased = true;
                count += 2;
            }
            7 | 8 if branches < 2 && count + 3 < target => {
                let inner = rng.gen_range(1..=2usize.min(target - count - 2));
                let stmts: Vec<String> = (0..inner).map(|_| call(rng, &objs)).collect();
                let o = objs.choose(rng).unwrap();
                if rng.gen_bool(0.5) {
                    let els = call(rng, &objs);
                    body.push(format!(
                        "if ({o}.getX() > 0) {{\n    {}\n}} else {{\n    {els}\n}}",
                        stmts.join("\n    ")
                    ));
                    count += 2 + inner;
                } else {
                    body.push(format!("for (int i = 0; i < 2; i++) {{\n    {}\n}}", stmts.join("\n    ")));
                    count += 1 + inner;
                }
                branches += 1;
            }
            _ => {}
        }
    }
    body.push(assertion(rng, &objs));
    count += 1;
    let mut test_src = String::from("package g;\n\nimport junit.framework.TestCase;\n\npublic class BoxTest extends TestCase {\n    public void testRandom() {\n");
    for s in &body {
        for line in s.lines() {
            test_src.push_str(&format!("        {line}\n"));
        }
    }
    test_src.push_str("    }\n}\n");
    Program { box_src, test_src, calls, writes, reads, statements: count, branches }
}

impl Program {
    pub fn files(&self) -> [(&'static str, &str); 2] {
        [("main/g/Box.java", &self.box_src), ("test/g/BoxTest.java", &self.test_src)]
    }

    /// Methods reachable from `m{i}` through one or more calls.
    pub fn reachable(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut queue: std::collections::VecDeque<usize> = self.calls[i].iter().copied().collect();
        while let Some(j) = queue.pop_front() {
            if out.insert(j) {
                queue.extend(self.calls[j].iter().copied());
            }
        }
        out
    }

    /// Fields accessed on some call path from `m{i}`, by enumerating the
    /// paths themselves (cycles cut at the first repeat).
    pub fn path_union(&self, i: usize, direct: &[BTreeSet<usize>]) -> BTreeSet<usize> {
        fn walk(p: &Program, path: &mut Vec<usize>, direct: &[BTreeSet<usize>], out: &mut BTreeSet<usize>) {
            let m = *path.last().unwrap();
            out.extend(direct[m].iter().copied());
            for &j in &p.calls[m] {
                if !path.contains(&j) {
                    path.push(j);
                    walk(p, path, direct, out);
                    path.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut vec![i], direct, &mut out);
        out
    }
}
