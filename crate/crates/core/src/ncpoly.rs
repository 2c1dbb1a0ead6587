//! Presented noncommutative algebras with a two-letter rewriting system to
//! a PBW-type normal form, plus Hopf structure maps given on generators and
//! extended (anti)multiplicatively.
//!
//! Rewriting is guaranteed to terminate because every rule's right hand
//! side words are strictly smaller than its two-letter left hand side in
//! the degree-lexicographic order (checked at construction).  Confluence is
//! not assumed: `verify_presentation` checks all overlap ambiguities.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Word = Vec<u8>;

#[derive(Debug, Clone)]
pub struct GenInfo {
    pub name: String,
    pub zdeg: i64,
    /// Weight for the termination order; the straightening rules must
    /// strictly decrease (weight, length, lex).
    pub weight: u64,
}

impl GenInfo {
    pub fn new(name: &str, zdeg: i64) -> Self {
        GenInfo {
            name: name.to_string(),
            zdeg,
            weight: 1,
        }
    }

    pub fn with_weight(name: &str, zdeg: i64, weight: u64) -> Self {
        GenInfo {
            name: name.to_string(),
            zdeg,
            weight,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RewriteRule<S> {
    pub lhs: [u8; 2],
    pub rhs: Vec<(Word, S)>,
}

#[derive(Debug, Clone)]
pub struct HopfData<S> {
    /// Coproduct of each generator as a sum of word pairs.
    pub delta: Vec<Vec<((Word, Word), S)>>,
    pub counit: Vec<S>,
    pub antipode: Vec<Vec<(Word, S)>>,
    pub antipode_inv: Vec<Vec<(Word, S)>>,
}

pub struct AlgebraPresentation<S> {
    pub name: String,
    gens: Vec<GenInfo>,
    rules: Vec<RewriteRule<S>>,
    rule_table: Vec<Vec<Option<usize>>>,
    hopf: Option<HopfData<S>>,
    coproduct_memo: Mutex<HashMap<Word, Vec<((Word, Word), S)>>>,
}

impl<S> fmt::Debug for AlgebraPresentation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraPresentation({})", self.name)
    }
}

pub type AlgRef<S> = Arc<AlgebraPresentation<S>>;

/// How `normal_form` picks the next reducible position; both must agree
/// (confluence) and tests compare them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceStrategy {
    Leftmost,
    Rightmost,
}

impl<S: Scalar> AlgebraPresentation<S> {
    pub fn new(
        name: &str,
        gens: Vec<GenInfo>,
        rules: Vec<RewriteRule<S>>,
        hopf: Option<HopfData<S>>,
    ) -> Result<AlgRef<S>> {
        let n = gens.len();
        let weight = |w: &[u8]| -> u64 { w.iter().map(|&g| gens[g as usize].weight).sum() };
        let mut rule_table = vec![vec![None; n]; n];
        for (i, r) in rules.iter().enumerate() {
            for (w, _) in &r.rhs {
                for &g in w {
                    if g as usize >= n {
                        return Err(Error::Parse(format!(
                            "rule rhs uses undeclared generator index {g}"
                        )));
                    }
                }
                let lhs: &[u8] = &r.lhs;
                if (weight(w), w.len(), &w[..]) >= (weight(lhs), lhs.len(), lhs) {
                    return Err(Error::Parse(format!(
                        "rule {:?} does not decrease the (weight, length, lex) order",
                        r.lhs
                    )));
                }
                if w.len() > 2 {
                    return Err(Error::Parse(format!(
                        "rule {:?} increases word length",
                        r.lhs
                    )));
                }
            }
            let [a, b] = r.lhs;
            if rule_table[a as usize][b as usize].is_some() {
                return Err(Error::Parse(format!("duplicate rule for pair {:?}", r.lhs)));
            }
            rule_table[a as usize][b as usize] = Some(i);
        }
        Ok(Arc::new(AlgebraPresentation {
            name: name.to_string(),
            gens,
            rules,
            rule_table,
            hopf,
            coproduct_memo: Mutex::new(HashMap::new()),
        }))
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_name(&self, i: usize) -> &str {
        &self.gens[i].name
    }

    pub fn gen_index(&self, name: &str) -> Option<u8> {
        self.gens.iter().position(|g| g.name == name).map(|i| i as u8)
    }

    pub fn gen_zdeg(&self, i: usize) -> i64 {
        self.gens[i].zdeg
    }

    pub fn gen_weight(&self, i: usize) -> u64 {
        self.gens[i].weight
    }

    pub fn rules(&self) -> &[RewriteRule<S>] {
        &self.rules
    }

    pub fn hopf(&self) -> Option<&HopfData<S>> {
        self.hopf.as_ref()
    }

    pub fn word_zdeg(&self, w: &[u8]) -> i64 {
        w.iter().map(|&g| self.gens[g as usize].zdeg).sum()
    }

    fn reducible_at(&self, w: &[u8], i: usize) -> Option<usize> {
        if i + 1 < w.len() {
            self.rule_table[w[i] as usize][w[i + 1] as usize]
        } else {
            None
        }
    }

    pub fn is_normal(&self, w: &[u8]) -> bool {
        (0..w.len()).all(|i| self.reducible_at(w, i).is_none())
    }

    /// Reduce a linear combination of free words to normal form.
    pub fn reduce_terms(
        &self,
        terms: impl IntoIterator<Item = (Word, S)>,
        strategy: ReduceStrategy,
    ) -> BTreeMap<Word, S> {
        let mut out: BTreeMap<Word, S> = BTreeMap::new();
        let mut stack: Vec<(Word, S)> = terms.into_iter().collect();
        while let Some((w, c)) = stack.pop() {
            if c.is_zero() {
                continue;
            }
            let pos = match strategy {
                ReduceStrategy::Leftmost => (0..w.len()).find(|&i| self.reducible_at(&w, i).is_some()),
                ReduceStrategy::Rightmost => {
                    (0..w.len()).rev().find(|&i| self.reducible_at(&w, i).is_some())
                }
            };
            match pos {
                None => {
                    let entry = out.entry(w).or_insert_with(S::zero);
                    *entry = entry.clone() + c;
                }
                Some(i) => {
                    let rule = &self.rules[self.reducible_at(&w, i).unwrap()];
                    for (rw, rc) in &rule.rhs {
                        let mut nw = Vec::with_capacity(w.len() + rw.len());
                        nw.extend_from_slice(&w[..i]);
                        nw.extend_from_slice(rw);
                        nw.extend_from_slice(&w[i + 2..]);
                        stack.push((nw, c.clone() * rc.clone()));
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// All normal words of length <= maxdeg (and given Z-degree when asked),
    /// ordered by word length then lexicographically.
    pub fn enumerate_basis(&self, maxdeg: usize, zdeg: Option<i64>) -> Vec<Word> {
        let mut out = Vec::new();
        let mut layer: Vec<Word> = vec![vec![]];
        for len in 0..=maxdeg {
            for w in &layer {
                if zdeg.map_or(true, |z| self.word_zdeg(w) == z) {
                    out.push(w.clone());
                }
            }
            if len == maxdeg {
                break;
            }
            let mut next = Vec::new();
            for w in &layer {
                for g in 0..self.gens.len() as u8 {
                    let ok = match w.last() {
                        None => true,
                        Some(&last) => self.rule_table[last as usize][g as usize].is_none(),
                    };
                    if ok {
                        let mut nw = w.clone();
                        nw.push(g);
                        next.push(nw);
                    }
                }
            }
            layer = next;
        }
        out
    }

    fn coproduct_word(self: &Arc<Self>, w: &[u8]) -> Result<Vec<((Word, Word), S)>> {
        let hopf = self
            .hopf
            .as_ref()
            .ok_or_else(|| Error::MissingHopfData(self.name.clone()))?;
        if let Some(v) = self.coproduct_memo.lock().unwrap().get(w) {
            return Ok(v.clone());
        }
        let mut acc: BTreeMap<(Word, Word), S> = BTreeMap::new();
        acc.insert((vec![], vec![]), S::one());
        for &g in w {
            let mut next: BTreeMap<(Word, Word), S> = BTreeMap::new();
            for ((l, r), c) in &acc {
                for ((gl, gr), gc) in &hopf.delta[g as usize] {
                    let mut nl = l.clone();
                    nl.extend_from_slice(gl);
                    let mut nr = r.clone();
                    nr.extend_from_slice(gr);
                    let e = next.entry((nl, nr)).or_insert_with(S::zero);
                    *e = e.clone() + c.clone() * gc.clone();
                }
            }
            acc = next;
        }
        // normalize both legs
        let mut out: BTreeMap<(Word, Word), S> = BTreeMap::new();
        for ((l, r), c) in acc {
            let ln = self.reduce_terms([(l, S::one())], ReduceStrategy::Leftmost);
            let rn = self.reduce_terms([(r, S::one())], ReduceStrategy::Leftmost);
            for (lw, lc) in &ln {
                for (rw, rc) in &rn {
                    let e = out.entry((lw.clone(), rw.clone())).or_insert_with(S::zero);
                    *e = e.clone() + c.clone() * lc.clone() * rc.clone();
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        let v: Vec<_> = out.into_iter().collect();
        self.coproduct_memo
            .lock()
            .unwrap()
            .insert(w.to_vec(), v.clone());
        Ok(v)
    }

    fn counit_word(&self, w: &[u8]) -> Result<S> {
        let hopf = self
            .hopf
            .as_ref()
            .ok_or_else(|| Error::MissingHopfData(self.name.clone()))?;
        let mut acc = S::one();
        for &g in w {
            acc = acc * hopf.counit[g as usize].clone();
        }
        Ok(acc)
    }

    /// Antipode of a free word: reverse and substitute generator images.
    fn antipode_word(&self, w: &[u8], inverse: bool) -> Result<Vec<(Word, S)>> {
        let hopf = self
            .hopf
            .as_ref()
            .ok_or_else(|| Error::MissingHopfData(self.name.clone()))?;
        let images = if inverse {
            &hopf.antipode_inv
        } else {
            &hopf.antipode
        };
        let mut acc: Vec<(Word, S)> = vec![(vec![], S::one())];
        for &g in w.iter().rev() {
            let mut next = Vec::new();
            for (aw, ac) in &acc {
                for (gw, gc) in &images[g as usize] {
                    let mut nw = aw.clone();
                    nw.extend_from_slice(gw);
                    next.push((nw, ac.clone() * gc.clone()));
                }
            }
            acc = next;
        }
        Ok(acc)
    }
}

fn same_algebra<S: Scalar>(a: &AlgRef<S>, b: &AlgRef<S>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.name == b.name {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch {
            left: a.name.clone(),
            right: b.name.clone(),
        })
    }
}

/// An element in normal form: a finite sum of normal words with nonzero
/// coefficients.
#[derive(Clone)]
pub struct NcElement<S> {
    pub alg: AlgRef<S>,
    pub terms: BTreeMap<Word, S>,
}

impl<S: Scalar> NcElement<S> {
    pub fn zero(alg: &AlgRef<S>) -> Self {
        NcElement {
            alg: alg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(alg: &AlgRef<S>) -> Self {
        NcElement::monomial(alg, vec![], S::one())
    }

    pub fn generator(alg: &AlgRef<S>, i: u8) -> Self {
        NcElement::monomial(alg, vec![i], S::one())
    }

    pub fn monomial(alg: &AlgRef<S>, word: Word, coeff: S) -> Self {
        let terms = alg.reduce_terms([(word, coeff)], ReduceStrategy::Leftmost);
        NcElement {
            alg: alg.clone(),
            terms,
        }
    }

    pub fn from_terms(alg: &AlgRef<S>, terms: impl IntoIterator<Item = (Word, S)>) -> Self {
        let terms = alg.reduce_terms(terms, ReduceStrategy::Leftmost);
        NcElement {
            alg: alg.clone(),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_algebra(&self.alg, &other.alg)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let e = terms.entry(w.clone()).or_insert_with(S::zero);
            *e = e.clone() + c.clone();
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(NcElement {
            alg: self.alg.clone(),
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        NcElement {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return NcElement::zero(&self.alg);
        }
        NcElement {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.clone() * s.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_algebra(&self.alg, &other.alg)?;
        let mut raw = Vec::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                raw.push((w, ca.clone() * cb.clone()));
            }
        }
        Ok(NcElement::from_terms(&self.alg, raw))
    }

    /// Common Z-degree of all words, or None when mixed.  Zero is reported
    /// as homogeneous of degree 0.
    pub fn zdegree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Some(0);
        };
        let d = self.alg.word_zdeg(first);
        for w in it {
            if self.alg.word_zdeg(w) != d {
                return None;
            }
        }
        Some(d)
    }

    pub fn coproduct(&self) -> Result<TensorElement<S>> {
        let mut out = TensorElement::zero(&self.alg, &self.alg);
        for (w, c) in &self.terms {
            for ((l, r), tc) in self.alg.coproduct_word(w)? {
                out.add_term(l, r, c.clone() * tc);
            }
        }
        Ok(out)
    }

    pub fn counit(&self) -> Result<S> {
        let mut acc = S::zero();
        for (w, c) in &self.terms {
            acc = acc + c.clone() * self.alg.counit_word(w)?;
        }
        Ok(acc)
    }

    pub fn antipode(&self, inverse: bool) -> Result<Self> {
        let mut raw = Vec::new();
        for (w, c) in &self.terms {
            for (aw, ac) in self.alg.antipode_word(w, inverse)? {
                raw.push((aw, c.clone() * ac));
            }
        }
        Ok(NcElement::from_terms(&self.alg, raw))
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.alg.name == other.alg.name && self.terms == other.terms
    }
}

impl<S: Scalar> fmt::Display for NcElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Word> = self.terms.keys().collect();
        keys.sort_by_key(|w| (w.len(), (*w).clone()));
        let mut first = true;
        for w in keys {
            let c = &self.terms[w];
            let word_str = if w.is_empty() {
                String::new()
            } else {
                w.iter()
                    .map(|&g| self.alg.gen_name(g as usize).to_string())
                    .collect::<Vec<_>>()
                    .join("*")
            };
            write_term(f, &mut first, c, &word_str)?;
        }
        Ok(())
    }
}

/// Shared term renderer: handles signs, unit coefficients and scalar
/// parenthesisation for element-like displays.
pub(crate) fn write_term<S: Scalar>(
    f: &mut fmt::Formatter<'_>,
    first: &mut bool,
    c: &S,
    word_str: &str,
) -> fmt::Result {
    let cs = c.to_string();
    let (neg, mag) = match cs.strip_prefix('-') {
        Some(rest) if !rest.contains(" - ") && !rest.contains(" + ") => (true, rest.to_string()),
        _ => (false, cs),
    };
    if *first {
        if neg {
            write!(f, "-")?;
        }
        *first = false;
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let coeff_str = if mag == "1" && !word_str.is_empty() {
        String::new()
    } else if mag.contains(' ') || mag.contains('/') {
        format!("({mag})")
    } else {
        mag
    };
    match (coeff_str.is_empty(), word_str.is_empty()) {
        (true, false) => write!(f, "{word_str}"),
        (false, true) => write!(f, "{coeff_str}"),
        (false, false) => write!(f, "{coeff_str}*{word_str}"),
        (true, true) => write!(f, "1"),
    }
}

/// An element of the tensor square (or of X (x) H): word pairs with both
/// components normal.
#[derive(Clone)]
pub struct TensorElement<S> {
    pub left_alg: AlgRef<S>,
    pub right_alg: AlgRef<S>,
    pub terms: BTreeMap<(Word, Word), S>,
}

impl<S: Scalar> TensorElement<S> {
    pub fn zero(left: &AlgRef<S>, right: &AlgRef<S>) -> Self {
        TensorElement {
            left_alg: left.clone(),
            right_alg: right.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, l: Word, r: Word, c: S) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((l, r)).or_insert_with(S::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn of(l: &NcElement<S>, r: &NcElement<S>) -> Self {
        let mut out = TensorElement::zero(&l.alg, &r.alg);
        for (wl, cl) in &l.terms {
            for (wr, cr) in &r.terms {
                out.add_term(wl.clone(), wr.clone(), cl.clone() * cr.clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        TensorElement {
            left_alg: self.left_alg.clone(),
            right_alg: self.right_alg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut raw: BTreeMap<(Word, Word), S> = BTreeMap::new();
        for ((la, ra), ca) in &self.terms {
            for ((lb, rb), cb) in &other.terms {
                let mut l = la.clone();
                l.extend_from_slice(lb);
                let mut r = ra.clone();
                r.extend_from_slice(rb);
                let e = raw.entry((l, r)).or_insert_with(S::zero);
                *e = e.clone() + ca.clone() * cb.clone();
            }
        }
        let mut out = TensorElement::zero(&self.left_alg, &self.right_alg);
        for ((l, r), c) in raw {
            let ln = self.left_alg.reduce_terms([(l, S::one())], ReduceStrategy::Leftmost);
            let rn = self
                .right_alg
                .reduce_terms([(r, S::one())], ReduceStrategy::Leftmost);
            for (lw, lc) in &ln {
                for (rw, rc) in &rn {
                    out.add_term(lw.clone(), rw.clone(), c.clone() * lc.clone() * rc.clone());
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Presentation verification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub check: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn pass(check: impl Into<String>) -> Self {
        CheckResult {
            check: check.into(),
            pass: true,
            witness: None,
        }
    }
    pub fn fail(check: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckResult {
            check: check.into(),
            pass: false,
            witness: Some(witness.into()),
        }
    }
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn record(&mut self, name: impl Into<String>, ok: bool, witness: impl Into<String>) {
        if ok {
            self.push(CheckResult::pass(name));
        } else {
            self.push(CheckResult::fail(name, witness));
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn word_name<S: Scalar>(alg: &AlgebraPresentation<S>, w: &[u8]) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        w.iter()
            .map(|&g| alg.gen_name(g as usize).to_string())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Mechanical verification of a presentation: rewriting confluence on all
/// overlap ambiguities, and (when Hopf data is present) the Hopf axioms on
/// generators and on both sides of every rewrite rule, plus the fact that
/// the structure maps respect the rules.
pub fn verify_presentation<S: Scalar>(alg: &AlgRef<S>) -> Report {
    let mut report = Report::default();

    // Local confluence: overlaps of two-letter rules are three-letter words.
    for r1 in alg.rules() {
        for r2 in alg.rules() {
            if r1.lhs[1] != r2.lhs[0] {
                continue;
            }
            let w = vec![r1.lhs[0], r1.lhs[1], r2.lhs[1]];
            // apply r1 at position 0 vs r2 at position 1, then normalize
            let via1: Vec<(Word, S)> = r1
                .rhs
                .iter()
                .map(|(rw, rc)| {
                    let mut nw = rw.clone();
                    nw.push(w[2]);
                    (nw, rc.clone())
                })
                .collect();
            let via2: Vec<(Word, S)> = r2
                .rhs
                .iter()
                .map(|(rw, rc)| {
                    let mut nw = vec![w[0]];
                    nw.extend_from_slice(rw);
                    (nw, rc.clone())
                })
                .collect();
            let n1 = alg.reduce_terms(via1, ReduceStrategy::Leftmost);
            let n2 = alg.reduce_terms(via2, ReduceStrategy::Leftmost);
            report.record(
                format!("confluence overlap {}", word_name(alg.as_ref(), &w)),
                n1 == n2,
                format!("two reductions of {} differ", word_name(alg.as_ref(), &w)),
            );
        }
    }

    if alg.hopf().is_none() {
        return report;
    }

    // Test elements: generators and both sides of every rule.
    let mut elements: Vec<(String, Vec<(Word, S)>)> = Vec::new();
    for g in 0..alg.num_gens() as u8 {
        elements.push((alg.gen_name(g as usize).to_string(), vec![(vec![g], S::one())]));
    }
    for r in alg.rules() {
        elements.push((
            format!("lhs {}", word_name(alg.as_ref(), &r.lhs)),
            vec![(r.lhs.to_vec(), S::one())],
        ));
        elements.push((
            format!("rhs of {}", word_name(alg.as_ref(), &r.lhs)),
            r.rhs.clone(),
        ));
    }

    for (name, raw) in &elements {
        let x = NcElement::from_terms(alg, raw.clone());
        check_hopf_axioms(alg, &x, name, &mut report);
    }

    // Structure maps respect the rules: image of lhs - rhs is zero.
    for r in alg.rules() {
        let rule_name = word_name(alg.as_ref(), &r.lhs);
        let mut diff_raw: Vec<(Word, S)> = vec![(r.lhs.to_vec(), S::one())];
        for (w, c) in &r.rhs {
            diff_raw.push((w.clone(), -c.clone()));
        }
        // Delta on the free combination (computed before normalization)
        let delta_ok = {
            let mut acc = TensorElement::zero(alg, alg);
            let mut err = None;
            for (w, c) in &diff_raw {
                match alg.coproduct_word(w) {
                    Ok(t) => {
                        for ((l, rr), tc) in t {
                            acc.add_term(l, rr, c.clone() * tc);
                        }
                    }
                    Err(e) => err = Some(e),
                }
            }
            err.is_none() && acc.is_zero()
        };
        report.record(
            format!("coproduct respects {rule_name}"),
            delta_ok,
            format!("delta(lhs - rhs) != 0 for {rule_name}"),
        );

        let eps_ok = {
            let mut acc = S::zero();
            for (w, c) in &diff_raw {
                acc = acc + c.clone() * alg.counit_word(w).unwrap_or_else(|_| S::zero());
            }
            acc.is_zero()
        };
        report.record(
            format!("counit respects {rule_name}"),
            eps_ok,
            format!("eps(lhs - rhs) != 0 for {rule_name}"),
        );

        for (label, inverse) in [("antipode", false), ("inverse antipode", true)] {
            let s_ok = {
                let mut raw = Vec::new();
                let mut err = None;
                for (w, c) in &diff_raw {
                    match alg.antipode_word(w, inverse) {
                        Ok(t) => {
                            for (aw, ac) in t {
                                raw.push((aw, c.clone() * ac));
                            }
                        }
                        Err(e) => err = Some(e),
                    }
                }
                err.is_none() && NcElement::from_terms(alg, raw).is_zero()
            };
            report.record(
                format!("{label} respects {rule_name}"),
                s_ok,
                format!("S(lhs - rhs) != 0 for {rule_name}"),
            );
        }
    }

    report
}

fn check_hopf_axioms<S: Scalar>(
    alg: &AlgRef<S>,
    x: &NcElement<S>,
    name: &str,
    report: &mut Report,
) {
    let Ok(dx) = x.coproduct() else {
        report.push(CheckResult::fail(
            format!("coproduct of {name}"),
            "missing Hopf data",
        ));
        return;
    };

    // counit laws
    let mut left = NcElement::zero(alg);
    let mut right = NcElement::zero(alg);
    for ((l, r), c) in &dx.terms {
        let el = alg.counit_word(l).unwrap();
        let er = alg.counit_word(r).unwrap();
        left = left
            .add(&NcElement::monomial(alg, r.clone(), c.clone() * el))
            .unwrap();
        right = right
            .add(&NcElement::monomial(alg, l.clone(), c.clone() * er))
            .unwrap();
    }
    report.record(
        format!("counit law on {name}"),
        left.equals(x) && right.equals(x),
        format!("(eps (x) id)delta != id on {name}"),
    );

    // coassociativity via triple-leg expansion
    let mut lhs: BTreeMap<(Word, Word, Word), S> = BTreeMap::new();
    let mut rhs: BTreeMap<(Word, Word, Word), S> = BTreeMap::new();
    for ((l, r), c) in &dx.terms {
        for ((a, b), c2) in alg.coproduct_word(l).unwrap() {
            let e = lhs.entry((a, b, r.clone())).or_insert_with(S::zero);
            *e = e.clone() + c.clone() * c2;
        }
        for ((a, b), c2) in alg.coproduct_word(r).unwrap() {
            let e = rhs.entry((l.clone(), a, b)).or_insert_with(S::zero);
            *e = e.clone() + c.clone() * c2;
        }
    }
    lhs.retain(|_, c| !c.is_zero());
    rhs.retain(|_, c| !c.is_zero());
    report.record(
        format!("coassociativity on {name}"),
        lhs == rhs,
        format!("(delta (x) id)delta != (id (x) delta)delta on {name}"),
    );

    // antipode laws: m(S (x) id)delta = eps * 1 = m(id (x) S)delta
    let eps = x.counit().unwrap();
    let eps_unit = NcElement::monomial(alg, vec![], eps);
    for (label, on_left) in [("antipode law (S (x) id)", true), ("antipode law (id (x) S)", false)]
    {
        let mut acc = NcElement::zero(alg);
        for ((l, r), c) in &dx.terms {
            let (sw, pw) = if on_left { (l, r) } else { (r, l) };
            for (aw, ac) in alg.antipode_word(sw, false).unwrap() {
                let mut w = Vec::new();
                if on_left {
                    w.extend_from_slice(&aw);
                    w.extend_from_slice(pw);
                } else {
                    w.extend_from_slice(pw);
                    w.extend_from_slice(&aw);
                }
                acc = acc
                    .add(&NcElement::monomial(alg, w, c.clone() * ac))
                    .unwrap();
            }
        }
        report.record(
            format!("{label} on {name}"),
            acc.equals(&eps_unit),
            format!("antipode law fails on {name}"),
        );
    }

    // S^-1 S = S S^-1 = id
    let s = x.antipode(false).unwrap();
    let back = s.antipode(true).unwrap();
    let si = x.antipode(true).unwrap();
    let forth = si.antipode(false).unwrap();
    report.record(
        format!("antipode invertible on {name}"),
        back.equals(x) && forth.equals(x),
        format!("S^-1 S != id on {name}"),
    );
}

// ---------------------------------------------------------------------------
// Built-in presentations
// ---------------------------------------------------------------------------

/// The q-deformed 2x2 special linear coordinate algebra, generators
/// a, b, c, d with the standard relations, coproduct, counit and antipode.
///
/// The internal generator order is b < a < d < c, so that sorted words
/// keep a and d adjacent and the two straightening rules
/// `ad -> 1 + q bc`, `da -> 1 + q^-1 bc` make the two-letter system
/// confluent (checked by `verify_presentation`).  Normal words are
/// b^j a^i c^k and b^j d^l c^k: the PBW basis, with no word containing
/// both a and d.
pub fn slq2<S: Scalar>(q: &S) -> AlgRef<S> {
    let qi = q.inv();
    let gens = vec![
        GenInfo::with_weight("b", -1, 1),
        GenInfo::with_weight("a", 1, 2),
        GenInfo::with_weight("d", -1, 2),
        GenInfo::with_weight("c", 1, 1),
    ];
    let (b, a, d, c) = (0u8, 1u8, 2u8, 3u8);
    let rules = vec![
        // a b = q b a
        RewriteRule { lhs: [a, b], rhs: vec![(vec![b, a], q.clone())] },
        // c b = b c
        RewriteRule { lhs: [c, b], rhs: vec![(vec![b, c], S::one())] },
        // c a = q^-1 a c
        RewriteRule { lhs: [c, a], rhs: vec![(vec![a, c], qi.clone())] },
        // c d = q d c
        RewriteRule { lhs: [c, d], rhs: vec![(vec![d, c], q.clone())] },
        // d b = q^-1 b d
        RewriteRule { lhs: [d, b], rhs: vec![(vec![b, d], qi.clone())] },
        // a d = 1 + q b c   and   d a = 1 + q^-1 b c
        RewriteRule {
            lhs: [a, d],
            rhs: vec![(vec![], S::one()), (vec![b, c], q.clone())],
        },
        RewriteRule {
            lhs: [d, a],
            rhs: vec![(vec![], S::one()), (vec![b, c], qi.clone())],
        },
    ];
    let hopf = HopfData {
        delta: vec![
            // delta b = a (x) b + b (x) d
            vec![((vec![a], vec![b]), S::one()), ((vec![b], vec![d]), S::one())],
            // delta a = a (x) a + b (x) c
            vec![((vec![a], vec![a]), S::one()), ((vec![b], vec![c]), S::one())],
            // delta d = d (x) d + c (x) b
            vec![((vec![d], vec![d]), S::one()), ((vec![c], vec![b]), S::one())],
            // delta c = c (x) a + d (x) c
            vec![((vec![c], vec![a]), S::one()), ((vec![d], vec![c]), S::one())],
        ],
        counit: vec![S::zero(), S::one(), S::one(), S::zero()],
        antipode: vec![
            vec![(vec![b], -qi.clone())],
            vec![(vec![d], S::one())],
            vec![(vec![a], S::one())],
            vec![(vec![c], -q.clone())],
        ],
        antipode_inv: vec![
            vec![(vec![b], -q.clone())],
            vec![(vec![d], S::one())],
            vec![(vec![a], S::one())],
            vec![(vec![c], -qi.clone())],
        ],
    };
    AlgebraPresentation::new("slq2", gens, rules, Some(hopf)).expect("slq2 presentation")
}

/// The group algebra of the integers: generators z, zi with zi z = z zi = 1.
/// Normal words are z^n or zi^n, i.e. Laurent monomials.
pub fn laurent_z<S: Scalar>() -> AlgRef<S> {
    let gens = vec![
        GenInfo::new("z", 1),
        GenInfo::new("zi", -1),
    ];
    let (z, zi) = (0u8, 1u8);
    let rules = vec![
        RewriteRule { lhs: [zi, z], rhs: vec![(vec![], S::one())] },
        RewriteRule { lhs: [z, zi], rhs: vec![(vec![], S::one())] },
    ];
    let hopf = HopfData {
        delta: vec![
            vec![((vec![z], vec![z]), S::one())],
            vec![((vec![zi], vec![zi]), S::one())],
        ],
        counit: vec![S::one(), S::one()],
        antipode: vec![(vec![(vec![zi], S::one())]), (vec![(vec![z], S::one())])],
        antipode_inv: vec![(vec![(vec![zi], S::one())]), (vec![(vec![z], S::one())])],
    };
    AlgebraPresentation::new("laurent_z", gens, rules, Some(hopf)).expect("laurent presentation")
}

/// Laurent monomial z^n as an element.
pub fn z_pow<S: Scalar>(alg: &AlgRef<S>, n: i64) -> NcElement<S> {
    let g = if n >= 0 { 0u8 } else { 1u8 };
    NcElement::monomial(alg, vec![g; n.unsigned_abs() as usize], S::one())
}

/// Tensor product of two presented algebras, flattened: generators of the
/// left factor first, cross pairs commute.  `suffix` disambiguates the
/// right factor's generator names when the factors coincide.
pub fn tensor_algebra<S: Scalar>(
    left: &AlgRef<S>,
    right: &AlgRef<S>,
    suffix: &str,
) -> AlgRef<S> {
    let nl = left.num_gens() as u8;
    let mut gens: Vec<GenInfo> = (0..left.num_gens())
        .map(|i| GenInfo::with_weight(left.gen_name(i), left.gen_zdeg(i), left.gen_weight(i)))
        .collect();
    for i in 0..right.num_gens() {
        gens.push(GenInfo::with_weight(
            &format!("{}{}", right.gen_name(i), suffix),
            right.gen_zdeg(i),
            right.gen_weight(i),
        ));
    }
    let mut rules: Vec<RewriteRule<S>> = left.rules().to_vec();
    for r in right.rules() {
        rules.push(RewriteRule {
            lhs: [r.lhs[0] + nl, r.lhs[1] + nl],
            rhs: r
                .rhs
                .iter()
                .map(|(w, c)| (w.iter().map(|&g| g + nl).collect(), c.clone()))
                .collect(),
        });
    }
    for j in 0..right.num_gens() as u8 {
        for i in 0..nl {
            rules.push(RewriteRule {
                lhs: [j + nl, i],
                rhs: vec![(vec![i, j + nl], S::one())],
            });
        }
    }
    let name = format!("{}(x){}{}", left.name, right.name, suffix);
    AlgebraPresentation::new(&name, gens, rules, None).expect("tensor presentation")
}

/// Split a normal word of a flattened tensor algebra into its two legs.
pub fn split_tensor_word(w: &[u8], left_gens: u8) -> (Word, Word) {
    let l: Word = w.iter().copied().filter(|&g| g < left_gens).collect();
    let r: Word = w
        .iter()
        .copied()
        .filter(|&g| g >= left_gens)
        .map(|g| g - left_gens)
        .collect();
    (l, r)
}

// ---------------------------------------------------------------------------
// Element parsing: q-scalars times juxtaposed generator names.
// ---------------------------------------------------------------------------

/// Parse the element grammar, e.g. `a*d - q*b*c` or `q^-2*a*b + 1`.
/// Scalars use the grammar of [`crate::qfield::parse_ratfunc`]; the value
/// of q is supplied so parsing works in both scalar modes.
pub fn parse_element<S: Scalar>(alg: &AlgRef<S>, q: &S, input: &str) -> Result<NcElement<S>> {
    let toks = tokenize(input)?;
    let mut pos = 0;
    let e = parse_sum(alg, q, &toks, &mut pos)?;
    if pos != toks.len() {
        return Err(Error::Parse(format!("trailing input in '{input}'")));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ETok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LPar,
    RPar,
}

pub(crate) fn tokenize(s: &str) -> Result<Vec<ETok>> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        match c {
            b'+' => out.push(ETok::Plus),
            b'-' => out.push(ETok::Minus),
            b'*' => out.push(ETok::Star),
            b'/' => out.push(ETok::Slash),
            b'^' => out.push(ETok::Caret),
            b'(' => out.push(ETok::LPar),
            b')' => out.push(ETok::RPar),
            b'0'..=b'9' => {
                let start = i;
                while i + 1 < b.len() && b[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let s = std::str::from_utf8(&b[start..=i]).unwrap();
                out.push(ETok::Int(
                    s.parse().map_err(|_| Error::Parse(format!("bad int {s}")))?,
                ));
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i + 1 < b.len() && (b[i + 1].is_ascii_alphanumeric() || b[i + 1] == b'\'') {
                    i += 1;
                }
                out.push(ETok::Ident(
                    std::str::from_utf8(&b[start..=i]).unwrap().to_string(),
                ));
            }
            _ => return Err(Error::Parse(format!("unexpected character '{}'", c as char))),
        }
        i += 1;
    }
    Ok(out)
}

fn parse_sum<S: Scalar>(
    alg: &AlgRef<S>,
    q: &S,
    toks: &[ETok],
    pos: &mut usize,
) -> Result<NcElement<S>> {
    let mut acc = parse_product(alg, q, toks, pos)?;
    while *pos < toks.len() {
        match toks[*pos] {
            ETok::Plus => {
                *pos += 1;
                acc = acc.add(&parse_product(alg, q, toks, pos)?)?;
            }
            ETok::Minus => {
                *pos += 1;
                acc = acc.sub(&parse_product(alg, q, toks, pos)?)?;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_product<S: Scalar>(
    alg: &AlgRef<S>,
    q: &S,
    toks: &[ETok],
    pos: &mut usize,
) -> Result<NcElement<S>> {
    let mut neg = false;
    while *pos < toks.len() && toks[*pos] == ETok::Minus {
        neg = !neg;
        *pos += 1;
    }
    let mut acc = parse_factor(alg, q, toks, pos)?;
    loop {
        match toks.get(*pos) {
            Some(ETok::Star) => {
                *pos += 1;
                let f = parse_factor(alg, q, toks, pos)?;
                acc = acc.mul(&f)?;
            }
            Some(ETok::Slash) => {
                *pos += 1;
                let d = parse_factor(alg, q, toks, pos)?;
                // division only by scalars (single unit-word term)
                let scalar = if d.terms.len() == 1 {
                    d.terms.get(&vec![]).cloned()
                } else {
                    None
                };
                match scalar {
                    Some(c) => acc = acc.scale(&c.inv()),
                    None => return Err(Error::Parse("division by a non-scalar".to_string())),
                }
            }
            _ => break,
        }
    }
    Ok(if neg { acc.neg() } else { acc })
}

fn parse_factor<S: Scalar>(
    alg: &AlgRef<S>,
    q: &S,
    toks: &[ETok],
    pos: &mut usize,
) -> Result<NcElement<S>> {
    if *pos >= toks.len() {
        return Err(Error::Parse("unexpected end of input".to_string()));
    }
    let base = match &toks[*pos] {
        ETok::Int(n) => {
            *pos += 1;
            NcElement::monomial(alg, vec![], S::from_int(*n))
        }
        ETok::Ident(id) if id == "q" => {
            *pos += 1;
            NcElement::monomial(alg, vec![], q.clone())
        }
        ETok::Ident(id) => {
            let g = alg
                .gen_index(id)
                .ok_or_else(|| Error::Parse(format!("unknown generator '{id}'")))?;
            *pos += 1;
            NcElement::generator(alg, g)
        }
        ETok::LPar => {
            *pos += 1;
            let e = parse_sum(alg, q, toks, pos)?;
            if *pos >= toks.len() || toks[*pos] != ETok::RPar {
                return Err(Error::Parse("expected ')'".to_string()));
            }
            *pos += 1;
            e
        }
        t => return Err(Error::Parse(format!("unexpected token {t:?}"))),
    };
    if *pos < toks.len() && toks[*pos] == ETok::Caret {
        *pos += 1;
        let mut eneg = false;
        while *pos < toks.len() && toks[*pos] == ETok::Minus {
            eneg = !eneg;
            *pos += 1;
        }
        let ETok::Int(n) = toks[*pos] else {
            return Err(Error::Parse("expected integer exponent".to_string()));
        };
        *pos += 1;
        let n = if eneg { -n } else { n };
        if n < 0 {
            // negative powers only for scalar factors
            if base.terms.len() == 1 {
                if let Some(c) = base.terms.get(&vec![]) {
                    return Ok(NcElement::monomial(alg, vec![], c.pow_i(n)));
                }
            }
            return Err(Error::Parse("negative power of a non-scalar".to_string()));
        }
        let mut acc = NcElement::unit(alg);
        for _ in 0..n {
            acc = acc.mul(&base)?;
        }
        return Ok(acc);
    }
    Ok(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::RatFunc;
    use num_traits::One;

    fn q() -> RatFunc {
        RatFunc::q()
    }

    fn x() -> AlgRef<RatFunc> {
        slq2(&q())
    }

    fn el(alg: &AlgRef<RatFunc>, s: &str) -> NcElement<RatFunc> {
        parse_element(alg, &q(), s).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let alg = x();
        let (b, a, d, _c) = (0u8, 1u8, 2u8, 3u8);
        // a b = q b a as elements
        let ab = NcElement::monomial(&alg, vec![a, b], RatFunc::one());
        assert!(ab.equals(&el(&alg, "q*b*a")));
        // a stays a
        assert!(NcElement::generator(&alg, a).equals(&el(&alg, "a")));
        // d a -> 1 + q^-1 b c
        let da = NcElement::monomial(&alg, vec![d, a], RatFunc::one());
        assert!(da.equals(&el(&alg, "1 + q^-1*b*c")));
    }

    #[test]
    fn mul_examples() {
        let alg = x();
        let a = el(&alg, "a");
        let d = el(&alg, "d");
        assert!(a.mul(&d).unwrap().equals(&el(&alg, "1 + q*b*c")));
        let one = NcElement::unit(&alg);
        let any = el(&alg, "a*b - q*c");
        assert!(one.mul(&any).unwrap().equals(&any));
        let b = el(&alg, "b");
        let c = el(&alg, "c");
        assert!(b.mul(&c).unwrap().equals(&el(&alg, "b*c")));
    }

    #[test]
    fn coproduct_examples() {
        let alg = x();
        let (b, a, d, c) = (0u8, 1u8, 2u8, 3u8);
        let da = el(&alg, "a").coproduct().unwrap();
        let mut expected = TensorElement::zero(&alg, &alg);
        expected.add_term(vec![a], vec![a], RatFunc::one());
        expected.add_term(vec![b], vec![c], RatFunc::one());
        assert!(da.sub(&expected).is_zero());

        let one = NcElement::unit(&alg);
        let d1 = one.coproduct().unwrap();
        let mut e1 = TensorElement::zero(&alg, &alg);
        e1.add_term(vec![], vec![], RatFunc::one());
        assert!(d1.sub(&e1).is_zero());

        // Hand expansion of delta(a)delta(b), with each leg normalized:
        // q aa (x) ba + q ba (x) 1 + (q^2 + 1) ba (x) bc + q bb (x) dc
        let ab = el(&alg, "a*b");
        let dab = ab.coproduct().unwrap();
        let mut exp = TensorElement::zero(&alg, &alg);
        exp.add_term(vec![a, a], vec![b, a], q());
        exp.add_term(vec![b, a], vec![], q());
        exp.add_term(vec![b, a], vec![b, c], RatFunc::q_pow(2) + RatFunc::one());
        exp.add_term(vec![b, b], vec![d, c], q());
        assert!(dab.sub(&exp).is_zero());
    }

    #[test]
    fn counit_antipode_examples() {
        let alg = x();
        let ad = el(&alg, "a*d");
        assert_eq!(ad.counit().unwrap(), RatFunc::one());
        let one = NcElement::unit(&alg);
        assert!(one.antipode(false).unwrap().equals(&one));
        // S(bc) = S(c)S(b) = (-q c)(-q^-1 b) = b c
        let bc = el(&alg, "b*c");
        assert!(bc.antipode(false).unwrap().equals(&el(&alg, "b*c")));
    }

    #[test]
    fn zdegree_examples() {
        let alg = x();
        assert_eq!(el(&alg, "a*c").zdegree(), Some(2));
        assert_eq!(NcElement::unit(&alg).zdegree(), Some(0));
        let ad = el(&alg, "a*d");
        assert_eq!(ad.zdegree(), Some(0));
        assert_eq!(el(&alg, "a + b").zdegree(), None);
    }

    #[test]
    fn zdegree_additive() {
        let alg = x();
        for (u, v) in [("a*c", "b"), ("a*b", "c*d"), ("a", "a*a")] {
            let eu = el(&alg, u);
            let ev = el(&alg, v);
            let du = eu.zdegree().unwrap();
            let dv = ev.zdegree().unwrap();
            let p = eu.mul(&ev).unwrap();
            assert_eq!(p.zdegree(), Some(du + dv));
        }
    }

    #[test]
    fn basis_enumeration() {
        let alg = x();
        let b1 = alg.enumerate_basis(1, None);
        assert_eq!(b1.len(), 5);
        assert_eq!(alg.enumerate_basis(0, None), vec![Vec::<u8>::new()]);
        let h = laurent_z::<RatFunc>();
        let hb = h.enumerate_basis(2, None);
        assert_eq!(hb.len(), 5);
        // PBW: no normal word contains both a and d
        let a = alg.gen_index("a").unwrap();
        let d = alg.gen_index("d").unwrap();
        for w in alg.enumerate_basis(4, None) {
            assert!(
                !(w.contains(&a) && w.contains(&d)),
                "word {w:?} contains both a and d"
            );
        }
    }

    #[test]
    fn confluence_strategies_agree() {
        let alg = x();
        // exhaustive words up to length 5 here; acceptance covers length 6
        let mut words: Vec<Word> = vec![vec![]];
        for _ in 0..5 {
            let mut next = Vec::new();
            for w in &words {
                for g in 0..4u8 {
                    let mut nw = w.clone();
                    nw.push(g);
                    next.push(nw);
                }
            }
            for w in &next {
                let l = alg.reduce_terms([(w.clone(), RatFunc::one())], ReduceStrategy::Leftmost);
                let r = alg.reduce_terms([(w.clone(), RatFunc::one())], ReduceStrategy::Rightmost);
                assert_eq!(l, r, "strategies disagree on {w:?}");
                for nw in l.keys() {
                    assert!(nw.len() <= w.len(), "length grew reducing {w:?}");
                }
            }
            words = next;
        }
    }

    #[test]
    fn presentation_verifies() {
        assert!(verify_presentation(&x()).all_pass());
        assert!(verify_presentation(&laurent_z::<RatFunc>()).all_pass());
    }

    #[test]
    fn corrupted_coproduct_is_flagged() {
        // delta(a) mistyped as a (x) a: coassociativity still holds for a
        // grouplike, but the counit law and rule preservation break.
        let qv = q();
        let good = slq2(&qv);
        let mut hopf = good.hopf().unwrap().clone();
        hopf.delta[0] = vec![((vec![0], vec![0]), RatFunc::one())];
        let gens = (0..good.num_gens())
            .map(|i| GenInfo::with_weight(good.gen_name(i), good.gen_zdeg(i), good.gen_weight(i)))
            .collect();
        let bad =
            AlgebraPresentation::new("slq2-bad", gens, good.rules().to_vec(), Some(hopf)).unwrap();
        assert!(!verify_presentation(&bad).all_pass());
    }

    #[test]
    fn tensor_of_algebras() {
        let alg = x();
        let h = laurent_z::<RatFunc>();
        let xh = tensor_algebra(&alg, &h, "");
        // z a -> a z
        let a = xh.gen_index("a").unwrap();
        let z = xh.gen_index("z").unwrap();
        let za = NcElement::monomial(&xh, vec![z, a], RatFunc::one());
        let az = NcElement::monomial(&xh, vec![a, z], RatFunc::one());
        assert!(za.equals(&az));
        assert!(verify_presentation(&xh).all_pass());
        let (l, r) = split_tensor_word(&[0, 1, 4, 5], 4);
        assert_eq!(l, vec![0, 1]);
        assert_eq!(r, vec![0, 1]);
    }

    #[test]
    fn display_and_parse_round_trip() {
        let alg = x();
        for s in ["a*d - q*b*c", "1 + q^-1*b*c", "q^-2*a*b + 1", "-a + 2*b*c"] {
            let e = el(&alg, s);
            let rt = el(&alg, &e.to_string());
            assert!(e.equals(&rt), "round trip of {s} via {e}");
        }
    }
}
