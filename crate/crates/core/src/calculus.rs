//! Differential graded algebras over a presented algebra.
//!
//! A calculus fixes invariant 1-form symbols, the differential of each
//! algebra generator, commutation rules that move every algebra coefficient
//! to the left of every form symbol, an exterior-derivative table for the
//! symbols, and a wedge table reducing products of symbols to a canonical
//! per-degree basis of form words.  Form elements are stored canonically:
//! a map from (normal algebra word, canonical form word) to a scalar.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Basis;
use crate::ncpoly::{
    laurent_z, slq2, tensor_algebra, AlgRef, CheckResult, ETok, NcElement, ReduceStrategy, Report,
    Word,
};
use crate::scalar::Scalar;

pub type FormWord = Vec<u8>;
pub type FormTerms<S> = Vec<((Word, FormWord), S)>;

#[derive(Debug, Clone)]
pub struct SymInfo {
    pub name: String,
    pub zdeg: i64,
}

/// Degree-2 reduction data: `basis2` lists the canonical symbol pairs; every
/// other pair must have an expansion with scalar coefficients.  A calculus
/// with `complete = false` (no degree-2 data yet) refuses computations that
/// need form degree >= 2.
#[derive(Debug, Clone)]
pub struct WedgeTable<S> {
    pub basis2: Vec<(u8, u8)>,
    pub expand: BTreeMap<(u8, u8), Vec<((u8, u8), S)>>,
    pub complete: bool,
}

pub struct CalculusPresentation<S> {
    pub name: String,
    pub alg: AlgRef<S>,
    syms: Vec<SymInfo>,
    d_gen: Vec<FormTerms<S>>,
    comm: Vec<Vec<FormTerms<S>>>,
    mc: Vec<Option<FormTerms<S>>>,
    wedge: WedgeTable<S>,
    /// Present when this calculus is a flattened tensor product.
    pub tensor: Option<TensorSplit<S>>,
}

#[derive(Clone)]
pub struct TensorSplit<S> {
    pub left: CalcRef<S>,
    pub right: CalcRef<S>,
    pub left_gens: u8,
    pub left_syms: u8,
}

impl<S> fmt::Debug for CalculusPresentation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CalculusPresentation({})", self.name)
    }
}

pub type CalcRef<S> = Arc<CalculusPresentation<S>>;

fn same_calculus<S: Scalar>(a: &CalcRef<S>, b: &CalcRef<S>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.name == b.name {
        Ok(())
    } else {
        Err(Error::CalculusMismatch {
            left: a.name.clone(),
            right: b.name.clone(),
        })
    }
}

impl<S: Scalar> CalculusPresentation<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        alg: AlgRef<S>,
        syms: Vec<SymInfo>,
        d_gen: Vec<FormTerms<S>>,
        comm: Vec<Vec<FormTerms<S>>>,
        mc: Vec<Option<FormTerms<S>>>,
        wedge: WedgeTable<S>,
        tensor: Option<TensorSplit<S>>,
    ) -> Result<CalcRef<S>> {
        if d_gen.len() != alg.num_gens() {
            return Err(Error::Parse("d table must cover every generator".into()));
        }
        if comm.len() != syms.len() || comm.iter().any(|row| row.len() != alg.num_gens()) {
            return Err(Error::Parse(
                "commutation table must cover every (symbol, generator) pair".into(),
            ));
        }
        if mc.len() != syms.len() {
            return Err(Error::Parse("exterior-derivative table size mismatch".into()));
        }
        Ok(Arc::new(CalculusPresentation {
            name: name.to_string(),
            alg,
            syms,
            d_gen,
            comm,
            mc,
            wedge,
            tensor,
        }))
    }

    pub fn num_syms(&self) -> usize {
        self.syms.len()
    }

    pub fn sym_name(&self, i: usize) -> &str {
        &self.syms[i].name
    }

    pub fn sym_index(&self, name: &str) -> Option<u8> {
        self.syms.iter().position(|s| s.name == name).map(|i| i as u8)
    }

    pub fn sym_zdeg(&self, i: usize) -> i64 {
        self.syms[i].zdeg
    }

    pub fn d_gen(&self, g: usize) -> &FormTerms<S> {
        &self.d_gen[g]
    }

    pub fn comm_rule(&self, sym: usize, g: usize) -> &FormTerms<S> {
        &self.comm[sym][g]
    }

    pub fn mc(&self, sym: usize) -> Option<&FormTerms<S>> {
        self.mc[sym].as_ref()
    }

    pub fn wedge_table(&self) -> &WedgeTable<S> {
        &self.wedge
    }

    pub fn form_zdeg(&self, fw: &[u8]) -> i64 {
        fw.iter().map(|&s| self.syms[s as usize].zdeg).sum()
    }

    pub fn key_zdeg(&self, w: &[u8], fw: &[u8]) -> i64 {
        self.alg.word_zdeg(w) + self.form_zdeg(fw)
    }

    fn pair_is_basis(&self, a: u8, b: u8) -> bool {
        self.wedge.basis2.contains(&(a, b))
    }

    pub fn form_word_is_canonical(&self, fw: &[u8]) -> bool {
        fw.windows(2).all(|p| self.pair_is_basis(p[0], p[1]))
    }

    /// Reduce a form word to the canonical basis; coefficients are scalars.
    fn reduce_form_word(&self, fw: FormWord) -> Result<Vec<(FormWord, S)>> {
        let mut out: BTreeMap<FormWord, S> = BTreeMap::new();
        let mut stack = vec![(fw, S::one())];
        while let Some((w, c)) = stack.pop() {
            if c.is_zero() {
                continue;
            }
            let bad = (0..w.len().saturating_sub(1)).find(|&i| !self.pair_is_basis(w[i], w[i + 1]));
            match bad {
                None => {
                    let e = out.entry(w).or_insert_with(S::zero);
                    *e = e.clone() + c;
                }
                Some(i) => {
                    let pair = (w[i], w[i + 1]);
                    let Some(exp) = self.wedge.expand.get(&pair) else {
                        return Err(Error::DegreeOverflow {
                            calculus: self.name.clone(),
                            degree: w.len(),
                        });
                    };
                    for ((x, y), ec) in exp {
                        let mut nw = w.clone();
                        nw[i] = *x;
                        nw[i + 1] = *y;
                        stack.push((nw, c.clone() * ec.clone()));
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out.into_iter().collect())
    }

    /// Move a form word leftwards past an algebra word, producing terms with
    /// the algebra coefficient on the left: F w = sum c (u, F').
    fn move_form_past_word(&self, fw: &[u8], w: &[u8]) -> Result<FormTerms<S>> {
        if w.is_empty() || fw.is_empty() {
            return Ok(vec![((w.to_vec(), fw.to_vec()), S::one())]);
        }
        // peel the first letter of w through all of fw, then recurse
        let g = w[0];
        let rest = &w[1..];
        let mut acc: FormTerms<S> = Vec::new();
        // move single letter g left through fw, right-to-left over symbols
        let mut partial: FormTerms<S> = vec![((vec![g], vec![]), S::one())];
        for &s in fw.iter().rev() {
            let mut next: FormTerms<S> = Vec::new();
            for ((u, f), c) in &partial {
                // s * u: commute s past each letter of u
                let moved = self.move_sym_past_word(s, u)?;
                for ((u2, f2), c2) in moved {
                    let mut nf = f2.clone();
                    nf.extend_from_slice(f);
                    next.push(((u2, nf), c.clone() * c2));
                }
            }
            partial = next;
        }
        for ((u, f), c) in partial {
            let tail = self.move_form_past_word(&f, rest)?;
            for ((u2, f2), c2) in tail {
                let mut nu = u.clone();
                nu.extend_from_slice(&u2);
                acc.push(((nu, f2), c.clone() * c2));
            }
        }
        Ok(acc)
    }

    /// s * word -> sum c (word', form(deg 1 tail)): commutes one symbol past
    /// a whole algebra word using the commutation table.
    fn move_sym_past_word(&self, s: u8, w: &[u8]) -> Result<FormTerms<S>> {
        if w.is_empty() {
            return Ok(vec![((vec![], vec![s]), S::one())]);
        }
        let g = w[0];
        let rule = &self.comm[s as usize][g as usize];
        let mut acc: FormTerms<S> = Vec::new();
        for ((u, f1), c) in rule {
            debug_assert_eq!(f1.len(), 1);
            let tail = self.move_form_past_word(f1, &w[1..])?;
            for ((u2, f2), c2) in tail {
                let mut nu = u.clone();
                nu.extend_from_slice(&u2);
                acc.push(((nu, f2), c.clone() * c2));
            }
        }
        Ok(acc)
    }
}

/// A graded differential form in canonical shape: all algebra coefficients
/// to the left, form words in the per-degree basis, no zero terms.
#[derive(Clone)]
pub struct FormElement<S> {
    pub calc: CalcRef<S>,
    pub degree: usize,
    pub terms: BTreeMap<(Word, FormWord), S>,
}

impl<S: Scalar> FormElement<S> {
    pub fn zero(calc: &CalcRef<S>, degree: usize) -> Self {
        FormElement {
            calc: calc.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(calc: &CalcRef<S>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((vec![], vec![]), S::one());
        FormElement {
            calc: calc.clone(),
            degree: 0,
            terms,
        }
    }

    pub fn from_nc(calc: &CalcRef<S>, e: &NcElement<S>) -> Self {
        FormElement {
            calc: calc.clone(),
            degree: 0,
            terms: e.terms.iter().map(|(w, c)| ((w.clone(), vec![]), c.clone())).collect(),
        }
    }

    pub fn sym(calc: &CalcRef<S>, s: u8) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((vec![], vec![s]), S::one());
        FormElement {
            calc: calc.clone(),
            degree: 1,
            terms,
        }
    }

    /// Canonicalize raw (word, form word) terms of a common degree.
    pub fn from_raw_terms(
        calc: &CalcRef<S>,
        degree: usize,
        raw: impl IntoIterator<Item = ((Word, FormWord), S)>,
    ) -> Result<Self> {
        let mut out: BTreeMap<(Word, FormWord), S> = BTreeMap::new();
        for ((w, fw), c) in raw {
            if c.is_zero() {
                continue;
            }
            debug_assert_eq!(fw.len(), degree);
            let words = calc.alg.reduce_terms([(w, S::one())], ReduceStrategy::Leftmost);
            let forms = calc.reduce_form_word(fw)?;
            for (nw, wc) in &words {
                for (nf, fc) in &forms {
                    let e = out.entry((nw.clone(), nf.clone())).or_insert_with(S::zero);
                    *e = e.clone() + c.clone() * wc.clone() * fc.clone();
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(FormElement {
            calc: calc.clone(),
            degree,
            terms: out,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_calculus(&self.calc, &other.calc)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(Error::Unsupported(format!(
                "adding forms of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let e = terms.entry(k.clone()).or_insert_with(S::zero);
            *e = e.clone() + c.clone();
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(FormElement {
            calc: self.calc.clone(),
            degree: self.degree,
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        FormElement {
            calc: self.calc.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return FormElement::zero(&self.calc, self.degree);
        }
        FormElement {
            calc: self.calc.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.clone() * s.clone()))
                .collect(),
        }
    }

    /// Wedge product; degree-additive, canonical output.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        same_calculus(&self.calc, &other.calc)?;
        let degree = self.degree + other.degree;
        let mut raw: Vec<((Word, FormWord), S)> = Vec::new();
        for ((w1, f1), c1) in &self.terms {
            for ((w2, f2), c2) in &other.terms {
                let moved = self.calc.move_form_past_word(f1, w2)?;
                for ((u, f1m), cm) in moved {
                    let mut w = w1.clone();
                    w.extend_from_slice(&u);
                    let mut f = f1m.clone();
                    f.extend_from_slice(f2);
                    raw.push(((w, f), c1.clone() * c2.clone() * cm));
                }
            }
        }
        FormElement::from_raw_terms(&self.calc, degree, raw)
    }

    /// Left multiplication by a degree-0 element.
    pub fn lmul_nc(&self, a: &NcElement<S>) -> Result<Self> {
        FormElement::from_nc(&self.calc, a).wedge(self)
    }

    /// Right multiplication by a degree-0 element.
    pub fn rmul_nc(&self, a: &NcElement<S>) -> Result<Self> {
        self.wedge(&FormElement::from_nc(&self.calc, a))
    }

    /// Exterior derivative: Leibniz over the algebra word letter by letter,
    /// then the symbol table on the form word.
    pub fn d(&self) -> Result<Self> {
        let calc = &self.calc;
        let mut acc = FormElement::zero(calc, self.degree + 1);
        for ((w, fw), c) in &self.terms {
            // derivative of the coefficient word
            for k in 0..w.len() {
                let prefix = FormElement::from_raw_terms(
                    calc,
                    0,
                    [((w[..k].to_vec(), vec![]), S::one())],
                )?;
                let dg = FormElement {
                    calc: calc.clone(),
                    degree: 1,
                    terms: calc.d_gen[w[k] as usize]
                        .iter()
                        .map(|(k2, c2)| (k2.clone(), c2.clone()))
                        .collect(),
                };
                let suffix = FormElement::from_raw_terms(
                    calc,
                    0,
                    [((w[k + 1..].to_vec(), vec![]), S::one())],
                )?;
                let tail = FormElement {
                    calc: calc.clone(),
                    degree: fw.len(),
                    terms: BTreeMap::from([((vec![], fw.clone()), S::one())]),
                };
                let term = prefix.wedge(&dg)?.wedge(&suffix)?.wedge(&tail)?;
                acc = acc.add(&term.scale(c))?;
            }
            // derivative of the form word
            for j in 0..fw.len() {
                let s = fw[j] as usize;
                let Some(mc) = calc.mc[s].as_ref() else {
                    return Err(Error::MissingMaurerCartan {
                        calculus: calc.name.clone(),
                        symbol: calc.syms[s].name.clone(),
                    });
                };
                let head = FormElement {
                    calc: calc.clone(),
                    degree: j,
                    terms: BTreeMap::from([((vec![], fw[..j].to_vec()), S::one())]),
                };
                let mid = FormElement {
                    calc: calc.clone(),
                    degree: 2,
                    terms: mc.iter().cloned().collect(),
                };
                let tail = FormElement {
                    calc: calc.clone(),
                    degree: fw.len() - j - 1,
                    terms: BTreeMap::from([((vec![], fw[j + 1..].to_vec()), S::one())]),
                };
                let w0 = FormElement::from_raw_terms(calc, 0, [((w.clone(), vec![]), S::one())])?;
                let term = w0.wedge(&head)?.wedge(&mid)?.wedge(&tail)?;
                let sign = if j % 2 == 0 { S::one() } else { -S::one() };
                acc = acc.add(&term.scale(&(c.clone() * sign)))?;
            }
        }
        Ok(acc)
    }

    /// Common Z-degree of all terms; zero is homogeneous of degree 0.
    pub fn zdegree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let Some((w, fw)) = it.next() else { return Some(0) };
        let d = self.calc.key_zdeg(w, fw);
        for (w, fw) in it {
            if self.calc.key_zdeg(w, fw) != d {
                return None;
            }
        }
        Some(d)
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.calc.name == other.calc.name && self.terms == other.terms
    }

    /// Keep only terms whose form word has the given split of symbols when
    /// the calculus is a tensor product: `left` symbols from the left
    /// factor and `degree - left` from the right.
    pub fn bidegree_component(&self, left: usize) -> Result<Self> {
        let split = self.calc.tensor.as_ref().ok_or_else(|| {
            Error::Unsupported("bidegree projection on a non-tensor calculus".into())
        })?;
        if left > self.degree {
            return Err(Error::BidegreeOutOfRange {
                wanted: (left, self.degree - left.min(self.degree)),
                total: self.degree,
            });
        }
        let ls = split.left_syms;
        let terms = self
            .terms
            .iter()
            .filter(|((_, fw), _)| fw.iter().filter(|&&s| s < ls).count() == left)
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        Ok(FormElement {
            calc: self.calc.clone(),
            degree: self.degree,
            terms,
        })
    }
}

impl<S: Scalar> fmt::Display for FormElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&(Word, FormWord)> = self.terms.keys().collect();
        keys.sort_by_key(|(w, fw)| (w.len(), w.clone(), fw.clone()));
        let mut first = true;
        for k in keys {
            let (w, fw) = k;
            let mut parts: Vec<String> = w
                .iter()
                .map(|&g| self.calc.alg.gen_name(g as usize).to_string())
                .collect();
            parts.extend(fw.iter().map(|&s| self.calc.sym_name(s as usize).to_string()));
            let word_str = parts.join("*");
            crate::ncpoly::write_term(f, &mut first, &self.terms[k], &word_str)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Truncated components
// ---------------------------------------------------------------------------

/// Ordered basis of a truncated component: all (normal word, canonical form
/// word) keys with word length <= maxdeg in the given form degree, filtered
/// by total Z-degree when given.
pub struct ComponentBasis<S> {
    pub calc: CalcRef<S>,
    pub degree: usize,
    pub keys: Basis<(Word, FormWord)>,
}

impl<S: Scalar> CalculusPresentation<S> {
    /// Canonical form words of a given degree.
    pub fn form_words(&self, degree: usize) -> Result<Vec<FormWord>> {
        if degree >= 2 && !self.wedge.complete {
            return Err(Error::DegreeOverflow {
                calculus: self.name.clone(),
                degree,
            });
        }
        let mut layer: Vec<FormWord> = vec![vec![]];
        for _ in 0..degree {
            let mut next = Vec::new();
            for w in &layer {
                for s in 0..self.syms.len() as u8 {
                    let ok = match w.last() {
                        None => true,
                        Some(&last) => self.pair_is_basis(last, s),
                    };
                    if ok {
                        let mut nw = w.clone();
                        nw.push(s);
                        next.push(nw);
                    }
                }
            }
            layer = next;
        }
        Ok(layer)
    }
}

pub fn component_basis<S: Scalar>(
    calc: &CalcRef<S>,
    degree: usize,
    maxdeg: usize,
    zdeg: Option<i64>,
) -> Result<ComponentBasis<S>> {
    let fws = calc.form_words(degree)?;
    let words = calc.alg.enumerate_basis(maxdeg, None);
    let mut keys = Vec::new();
    for w in &words {
        for fw in &fws {
            if zdeg.map_or(true, |z| calc.key_zdeg(w, fw) == z) {
                keys.push((w.clone(), fw.clone()));
            }
        }
    }
    Ok(ComponentBasis {
        calc: calc.clone(),
        degree,
        keys: Basis::new(keys),
    })
}

impl<S: Scalar> ComponentBasis<S> {
    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    /// Coordinates of a form in this basis; None if a term falls outside.
    pub fn vector_of(&self, e: &FormElement<S>) -> Option<Vec<S>> {
        let mut v = vec![S::zero(); self.keys.len()];
        for (k, c) in &e.terms {
            let i = self.keys.index_of(k)?;
            v[i] = c.clone();
        }
        Some(v)
    }

    pub fn element_of(&self, v: &[S]) -> FormElement<S> {
        let mut terms = BTreeMap::new();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(self.keys.key(i).clone(), c.clone());
            }
        }
        FormElement {
            calc: self.calc.clone(),
            degree: self.degree,
            terms,
        }
    }

    pub fn label(&self, i: usize) -> String {
        let (w, fw) = self.keys.key(i);
        let mut parts: Vec<String> = w
            .iter()
            .map(|&g| self.calc.alg.gen_name(g as usize).to_string())
            .collect();
        parts.extend(fw.iter().map(|&s| self.calc.sym_name(s as usize).to_string()));
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// d^2 = 0 on every basis word of length <= maxdeg and on every symbol.
pub fn d_squared_check<S: Scalar>(calc: &CalcRef<S>, maxdeg: usize) -> Report {
    let mut report = Report::default();
    for w in calc.alg.enumerate_basis(maxdeg, None) {
        let e = FormElement::from_raw_terms(calc, 0, [((w.clone(), vec![]), S::one())]);
        let name = if w.is_empty() {
            "1".to_string()
        } else {
            w.iter()
                .map(|&g| calc.alg.gen_name(g as usize).to_string())
                .collect::<Vec<_>>()
                .join("*")
        };
        match e.and_then(|e| e.d()).and_then(|de| de.d()) {
            Ok(dd) => report.record(
                format!("d^2 = 0 on {name}"),
                dd.is_zero(),
                format!("d^2({name}) = {}", dd),
            ),
            Err(err) => report.push(CheckResult::fail(format!("d^2 = 0 on {name}"), err.to_string())),
        }
    }
    for s in 0..calc.num_syms() as u8 {
        let name = calc.sym_name(s as usize).to_string();
        if calc.mc(s as usize).is_none() {
            report.push(CheckResult::pass(format!(
                "d^2 on {name} skipped: no exterior derivative table"
            )));
            continue;
        }
        match FormElement::sym(calc, s).d().and_then(|d| d.d()) {
            Ok(dd) => report.record(
                format!("d^2 = 0 on {name}"),
                dd.is_zero(),
                format!("d^2({name}) = {}", dd),
            ),
            Err(err) => report.push(CheckResult::fail(format!("d^2 = 0 on {name}"), err.to_string())),
        }
    }
    report
}

/// Structural checks: the commutation rules respect the algebra rewrite
/// rules, d respects them, wedge products of symbols associate, and d^2
/// vanishes on generators and symbols.
pub fn verify_calculus<S: Scalar>(calc: &CalcRef<S>) -> Report {
    let mut report = Report::default();
    let alg = &calc.alg;

    for rule in alg.rules() {
        let rule_name: String = rule
            .lhs
            .iter()
            .map(|&g| alg.gen_name(g as usize).to_string())
            .collect::<Vec<_>>()
            .join("*");
        let lhs_el = NcElement::monomial(alg, rule.lhs.to_vec(), S::one());
        // d respects the rule: d of both sides as degree-0 elements agree
        // (both sides normalize to the same element, so compute d of the
        // free words instead).
        let d_of = |w: &[u8]| -> Result<FormElement<S>> {
            let mut acc = FormElement::zero(calc, 1);
            for k in 0..w.len() {
                let prefix =
                    FormElement::from_raw_terms(calc, 0, [((w[..k].to_vec(), vec![]), S::one())])?;
                let dg = FormElement {
                    calc: calc.clone(),
                    degree: 1,
                    terms: calc.d_gen[w[k] as usize].iter().cloned().collect(),
                };
                let suffix = FormElement::from_raw_terms(
                    calc,
                    0,
                    [((w[k + 1..].to_vec(), vec![]), S::one())],
                )?;
                acc = acc.add(&prefix.wedge(&dg)?.wedge(&suffix)?)?;
            }
            Ok(acc)
        };
        let mut ok = true;
        let mut witness = String::new();
        match d_of(&rule.lhs) {
            Ok(dl) => {
                let mut dr = FormElement::zero(calc, 1);
                for (w, c) in &rule.rhs {
                    match d_of(w) {
                        Ok(dw) => dr = dr.add(&dw.scale(c)).unwrap(),
                        Err(e) => {
                            ok = false;
                            witness = e.to_string();
                        }
                    }
                }
                if ok {
                    let diff = dl.sub(&dr).unwrap();
                    ok = diff.is_zero();
                    if !ok {
                        witness = format!("d(lhs) - d(rhs) = {diff}");
                    }
                }
            }
            Err(e) => {
                ok = false;
                witness = e.to_string();
            }
        }
        report.record(format!("d respects {rule_name}"), ok, witness);

        // each symbol commutes consistently past both sides of the rule
        for s in 0..calc.num_syms() as u8 {
            let sname = calc.sym_name(s as usize);
            let se = FormElement::sym(calc, s);
            let via_lhs = se.wedge(&FormElement::from_nc(calc, &lhs_el));
            let mut via_rhs = Ok(FormElement::zero(calc, 1));
            for (w, c) in &rule.rhs {
                let piece = FormElement::from_raw_terms(calc, 0, [((w.clone(), vec![]), S::one())])
                    .and_then(|p| se.wedge(&p));
                via_rhs = match (via_rhs, piece) {
                    (Ok(acc), Ok(p)) => acc.add(&p.scale(c)),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
            }
            match (via_lhs, via_rhs) {
                (Ok(l), Ok(r)) => {
                    let diff = l.sub(&r).unwrap();
                    report.record(
                        format!("{sname} commutes past {rule_name}"),
                        diff.is_zero(),
                        format!("difference {diff}"),
                    );
                }
                (Err(e), _) | (_, Err(e)) => {
                    report.push(CheckResult::fail(
                        format!("{sname} commutes past {rule_name}"),
                        e.to_string(),
                    ));
                }
            }
        }
    }

    // wedge associativity on symbol triples (when degree 3 is available)
    if calc.wedge.complete {
        for s1 in 0..calc.num_syms() as u8 {
            for s2 in 0..calc.num_syms() as u8 {
                for s3 in 0..calc.num_syms() as u8 {
                    let a = FormElement::sym(calc, s1);
                    let b = FormElement::sym(calc, s2);
                    let c = FormElement::sym(calc, s3);
                    let l = a.wedge(&b).and_then(|ab| ab.wedge(&c));
                    let r = b.wedge(&c).and_then(|bc| a.wedge(&bc));
                    match (l, r) {
                        (Ok(l), Ok(r)) => {
                            let diff = l.sub(&r).unwrap();
                            report.record(
                                format!(
                                    "wedge associativity {}*{}*{}",
                                    calc.sym_name(s1 as usize),
                                    calc.sym_name(s2 as usize),
                                    calc.sym_name(s3 as usize)
                                ),
                                diff.is_zero(),
                                format!("difference {diff}"),
                            );
                        }
                        (Err(e), _) | (_, Err(e)) => report.push(CheckResult::fail(
                            "wedge associativity".to_string(),
                            e.to_string(),
                        )),
                    }
                }
            }
        }
    }

    report.merge(d_squared_check(calc, 1));
    report
}

// ---------------------------------------------------------------------------
// Built-in calculi
// ---------------------------------------------------------------------------

/// The 3D left-covariant calculus on the quantum special linear algebra:
/// three invariant 1-forms w0, w1, w2.
pub fn build_3d<S: Scalar>(q: &S) -> CalcRef<S> {
    let alg = slq2(q);
    let (b, a, d, c) = (0u8, 1u8, 2u8, 3u8);
    let (w0, w1, w2) = (0u8, 1u8, 2u8);
    let one = S::one();
    let q2 = q.clone() * q.clone();
    let syms = vec![
        SymInfo { name: "w0".into(), zdeg: -2 },
        SymInfo { name: "w1".into(), zdeg: 0 },
        SymInfo { name: "w2".into(), zdeg: 2 },
    ];
    // d a = a w1 - q b w2 ; d b = a w0 - q^2 b w1
    // d c = c w1 - q d w2 ; d d = c w0 - q^2 d w1
    let mut d_gen: Vec<FormTerms<S>> = vec![vec![]; 4];
    d_gen[a as usize] = vec![
        ((vec![a], vec![w1]), one.clone()),
        ((vec![b], vec![w2]), -q.clone()),
    ];
    d_gen[b as usize] = vec![
        ((vec![a], vec![w0]), one.clone()),
        ((vec![b], vec![w1]), -q2.clone()),
    ];
    d_gen[c as usize] = vec![
        ((vec![c], vec![w1]), one.clone()),
        ((vec![d], vec![w2]), -q.clone()),
    ];
    d_gen[d as usize] = vec![
        ((vec![c], vec![w0]), one.clone()),
        ((vec![d], vec![w1]), -q2.clone()),
    ];
    // commutation: w^k a = q^{e} a w^k etc.
    let scale = |g: u8, sym: u8, e: i64| -> FormTerms<S> {
        vec![((vec![g], vec![sym]), q.pow_i(e))]
    };
    let mut comm: Vec<Vec<FormTerms<S>>> = vec![vec![vec![]; 4]; 3];
    for (gen_up, gen_dn) in [(a, b), (c, d)] {
        comm[w0 as usize][gen_up as usize] = scale(gen_up, w0, -1);
        comm[w0 as usize][gen_dn as usize] = scale(gen_dn, w0, 1);
        comm[w1 as usize][gen_up as usize] = scale(gen_up, w1, -2);
        comm[w1 as usize][gen_dn as usize] = scale(gen_dn, w1, 2);
        comm[w2 as usize][gen_up as usize] = scale(gen_up, w2, -1);
        comm[w2 as usize][gen_dn as usize] = scale(gen_dn, w2, 1);
    }
    // d w0 = q^2 (q^2 + 1) w0 w1 ; d w1 = q w0 w2 ; d w2 = q^2 (q^2 + 1) w1 w2
    let big = q2.clone() * (q2.clone() + one.clone());
    let mc = vec![
        Some(vec![((vec![], vec![w0, w1]), big.clone())]),
        Some(vec![((vec![], vec![w0, w2]), q.clone())]),
        Some(vec![((vec![], vec![w1, w2]), big)]),
    ];
    // wedge: squares vanish; w2 w0 = -q^2 w0 w2 ; w1 w0 = -q^4 w0 w1 ;
    // w2 w1 = -q^4 w1 w2
    let q4 = q2.clone() * q2.clone();
    let mut expand = BTreeMap::new();
    for s in [w0, w1, w2] {
        expand.insert((s, s), vec![]);
    }
    expand.insert((w2, w0), vec![((w0, w2), -q2.clone())]);
    expand.insert((w1, w0), vec![((w0, w1), -q4.clone())]);
    expand.insert((w2, w1), vec![((w1, w2), -q4)]);
    let wedge = WedgeTable {
        basis2: vec![(w0, w1), (w0, w2), (w1, w2)],
        expand,
        complete: true,
    };
    CalculusPresentation::new("3d", alg, syms, d_gen, comm, mc, wedge, None).expect("3d calculus")
}

/// Calculus on the Laurent algebra induced by the 3D structure:
/// dz = z zeta with zeta z = q^-2 z zeta.
pub fn build_h3<S: Scalar>(q: &S) -> CalcRef<S> {
    build_h(q, "h3", -2, "3d-induced")
}

/// Calculus on the Laurent algebra induced by the 4D structure:
/// dz = z zeta with zeta z = q z zeta.
pub fn build_h4<S: Scalar>(q: &S) -> CalcRef<S> {
    build_h(q, "h4", 1, "4d-induced")
}

fn build_h<S: Scalar>(q: &S, name: &str, e: i64, _origin: &str) -> CalcRef<S> {
    let alg = laurent_z::<S>();
    let (z, zi) = (0u8, 1u8);
    let zeta = 0u8;
    let syms = vec![SymInfo { name: "zeta".into(), zdeg: 0 }];
    // zeta z = q^e z zeta ; zeta zi = q^-e zi zeta
    // d z = z zeta ; d zi = -q^-e zi zeta (from 0 = d(zi z) = d(zi) z + zi dz)
    let d_gen = vec![
        vec![((vec![z], vec![zeta]), S::one())],
        vec![((vec![zi], vec![zeta]), -q.pow_i(-e))],
    ];
    let comm = vec![vec![
        vec![((vec![z], vec![zeta]), q.pow_i(e))],
        vec![((vec![zi], vec![zeta]), q.pow_i(-e))],
    ]];
    let mc = vec![Some(vec![])];
    let mut expand = BTreeMap::new();
    expand.insert((zeta, zeta), vec![]);
    let wedge = WedgeTable {
        basis2: vec![],
        expand,
        complete: true,
    };
    CalculusPresentation::new(name, alg, syms, d_gen, comm, mc, wedge, None).expect("h calculus")
}

/// The 4D bicovariant calculus on the quantum special linear algebra:
/// four invariant 1-forms w1, w2, wp, wm.  Form degrees above 1 need the
/// braiding-derived wedge table (see the map module); until then the
/// wedge table is incomplete and degree >= 2 operations error out.
pub fn build_4d<S: Scalar>(q: &S) -> CalcRef<S> {
    let alg = slq2(q);
    let (b, a, d, c) = (0u8, 1u8, 2u8, 3u8);
    let (w1, w2, wp, wm) = (0u8, 1u8, 2u8, 3u8);
    let one = S::one();
    let qi = q.inv();
    let q2 = q.clone() * q.clone();
    let qp1_inv = (q.clone() + one.clone()).inv();
    // c1 = (q - q^-1 - q^-2)/(q+1), c2 = q^-1/(q+1),
    // c3 = q/(q+1), c4 = q^-2/(q+1)
    let c1 = (q.clone() - qi.clone() - qi.clone() * qi.clone()) * qp1_inv.clone();
    let c2 = qi.clone() * qp1_inv.clone();
    let c3 = q.clone() * qp1_inv.clone();
    let c4 = qi.clone() * qi.clone() * qp1_inv.clone();
    let qm2 = q.pow_i(-2);
    let syms = vec![
        SymInfo { name: "w1".into(), zdeg: 0 },
        SymInfo { name: "w2".into(), zdeg: 0 },
        SymInfo { name: "wp".into(), zdeg: 2 },
        SymInfo { name: "wm".into(), zdeg: -2 },
    ];
    let mut d_gen: Vec<FormTerms<S>> = vec![vec![]; 4];
    d_gen[a as usize] = vec![
        ((vec![a], vec![w1]), c1.clone()),
        ((vec![b], vec![wp]), -qm2.clone()),
        ((vec![a], vec![w2]), c2.clone()),
    ];
    d_gen[b as usize] = vec![
        ((vec![b], vec![w1]), c3.clone()),
        ((vec![a], vec![wm]), -qm2.clone()),
        ((vec![b], vec![w2]), -c4.clone()),
    ];
    d_gen[c as usize] = vec![
        ((vec![c], vec![w1]), c1.clone()),
        ((vec![d], vec![wp]), -qm2.clone()),
        ((vec![c], vec![w2]), c2.clone()),
    ];
    d_gen[d as usize] = vec![
        ((vec![d], vec![w1]), c3.clone()),
        ((vec![c], vec![wm]), -qm2.clone()),
        ((vec![d], vec![w2]), -c4.clone()),
    ];
    let lam = q.clone() - qi.clone(); // q - q^-1
    let q2m1 = q2.clone() - one.clone(); // q^2 - 1
    let mut comm: Vec<Vec<FormTerms<S>>> = vec![vec![vec![]; 4]; 4];
    for (ga, gb) in [(a, b), (c, d)] {
        // w2 a = q a w2 - (q - q^-1) b wp + q (q - q^-1)^2 a w1
        comm[w2 as usize][ga as usize] = vec![
            ((vec![ga], vec![w2]), q.clone()),
            ((vec![gb], vec![wp]), -lam.clone()),
            ((vec![ga], vec![w1]), q.clone() * lam.clone() * lam.clone()),
        ];
        // w2 b = q^-1 b w2 - (q - q^-1) a wm
        comm[w2 as usize][gb as usize] = vec![
            ((vec![gb], vec![w2]), qi.clone()),
            ((vec![ga], vec![wm]), -lam.clone()),
        ];
        // wm a = a wm - (q^2 - 1) b w1
        comm[wm as usize][ga as usize] = vec![
            ((vec![ga], vec![wm]), one.clone()),
            ((vec![gb], vec![w1]), -q2m1.clone()),
        ];
        // wm b = b wm
        comm[wm as usize][gb as usize] = vec![((vec![gb], vec![wm]), one.clone())];
        // wp a = a wp
        comm[wp as usize][ga as usize] = vec![((vec![ga], vec![wp]), one.clone())];
        // wp b = b wp - (q^2 - 1) a w1
        comm[wp as usize][gb as usize] = vec![
            ((vec![gb], vec![wp]), one.clone()),
            ((vec![ga], vec![w1]), -q2m1.clone()),
        ];
        // w1 a = q^-1 a w1 ; w1 b = q b w1
        comm[w1 as usize][ga as usize] = vec![((vec![ga], vec![w1]), qi.clone())];
        comm[w1 as usize][gb as usize] = vec![((vec![gb], vec![w1]), q.clone())];
    }
    let mc = vec![None, None, None, None];
    let wedge = WedgeTable {
        basis2: vec![],
        expand: BTreeMap::new(),
        complete: false,
    };
    CalculusPresentation::new("4d", alg, syms, d_gen, comm, mc, wedge, None).expect("4d calculus")
}

/// Replace the degree >= 2 wedge data of a calculus (used to install the
/// braiding-derived table on the 4D instance).
pub fn with_wedge_table<S: Scalar>(calc: &CalcRef<S>, wedge: WedgeTable<S>) -> CalcRef<S> {
    Arc::new(CalculusPresentation {
        name: calc.name.clone(),
        alg: calc.alg.clone(),
        syms: calc.syms.clone(),
        d_gen: calc.d_gen.clone(),
        comm: calc.comm.clone(),
        mc: calc.mc.clone(),
        wedge,
        tensor: calc.tensor.as_ref().cloned(),
    })
}

/// Flattened tensor product of two calculi over the flattened tensor
/// algebra.  Cross commutation is trivial on degree-0 letters and carries
/// the graded sign (a (x) h)(a' (x) h') = (-1)^{|h||a'|} aa' (x) hh'
/// through the wedge swap of symbols.
pub fn tensor_calculus<S: Scalar>(
    c1: &CalcRef<S>,
    c2: &CalcRef<S>,
    suffix: &str,
) -> CalcRef<S> {
    let alg = tensor_algebra(&c1.alg, &c2.alg, suffix);
    let n1g = c1.alg.num_gens() as u8;
    let n1s = c1.num_syms() as u8;
    let mut syms: Vec<SymInfo> = c1.syms.clone();
    for s in &c2.syms {
        syms.push(SymInfo {
            name: format!("{}{}", s.name, suffix),
            zdeg: s.zdeg,
        });
    }
    let shift_terms = |t: &FormTerms<S>, gshift: u8, sshift: u8| -> FormTerms<S> {
        t.iter()
            .map(|((w, fw), c)| {
                (
                    (
                        w.iter().map(|&g| g + gshift).collect(),
                        fw.iter().map(|&s| s + sshift).collect(),
                    ),
                    c.clone(),
                )
            })
            .collect()
    };
    let mut d_gen: Vec<FormTerms<S>> = Vec::new();
    for g in 0..c1.alg.num_gens() {
        d_gen.push(c1.d_gen[g].clone());
    }
    for g in 0..c2.alg.num_gens() {
        d_gen.push(shift_terms(&c2.d_gen[g], n1g, n1s));
    }
    let total_gens = alg.num_gens();
    let mut comm: Vec<Vec<FormTerms<S>>> = vec![vec![vec![]; total_gens]; syms.len()];
    for s in 0..c1.num_syms() {
        for g in 0..c1.alg.num_gens() {
            comm[s][g] = c1.comm[s][g].clone();
        }
        for g in 0..c2.alg.num_gens() {
            // left-factor symbol commutes trivially with right-factor letters
            comm[s][n1g as usize + g] = vec![(
                (vec![n1g + g as u8], vec![s as u8]),
                S::one(),
            )];
        }
    }
    for s in 0..c2.num_syms() {
        let si = n1s as usize + s;
        for g in 0..c1.alg.num_gens() {
            comm[si][g] = vec![((vec![g as u8], vec![si as u8]), S::one())];
        }
        for g in 0..c2.alg.num_gens() {
            comm[si][n1g as usize + g] = shift_terms(&c2.comm[s][g], n1g, n1s);
        }
    }
    let mut mc: Vec<Option<FormTerms<S>>> = Vec::new();
    for s in 0..c1.num_syms() {
        mc.push(c1.mc[s].clone());
    }
    for s in 0..c2.num_syms() {
        mc.push(c2.mc[s].as_ref().map(|t| shift_terms(t, n1g, n1s)));
    }
    let mut basis2: Vec<(u8, u8)> = c1.wedge.basis2.clone();
    for &(x, y) in &c2.wedge.basis2 {
        basis2.push((x + n1s, y + n1s));
    }
    for s1 in 0..n1s {
        for s2 in 0..c2.num_syms() as u8 {
            basis2.push((s1, s2 + n1s));
        }
    }
    let mut expand: BTreeMap<(u8, u8), Vec<((u8, u8), S)>> = BTreeMap::new();
    for (&k, v) in &c1.wedge.expand {
        expand.insert(k, v.clone());
    }
    for (&(x, y), v) in &c2.wedge.expand {
        expand.insert(
            (x + n1s, y + n1s),
            v.iter()
                .map(|((u, w), c)| ((u + n1s, w + n1s), c.clone()))
                .collect(),
        );
    }
    for s1 in 0..n1s {
        for s2 in 0..c2.num_syms() as u8 {
            // both factors are generated by 1-forms: the swap carries -1
            expand.insert((s2 + n1s, s1), vec![((s1, s2 + n1s), -S::one())]);
        }
    }
    let wedge = WedgeTable {
        basis2,
        expand,
        complete: c1.wedge.complete && c2.wedge.complete,
    };
    let name = format!("{}(x){}{}", c1.name, c2.name, suffix);
    let tensor = Some(TensorSplit {
        left: c1.clone(),
        right: c2.clone(),
        left_gens: n1g,
        left_syms: n1s,
    });
    CalculusPresentation::new(&name, alg, syms, d_gen, comm, mc, wedge, tensor)
        .expect("tensor calculus")
}

// ---------------------------------------------------------------------------
// Parsing and rendering of forms and calculus presentations
// ---------------------------------------------------------------------------

/// Parse the form grammar: scalars, generator names and symbol names joined
/// by `*`, `+`/`-` separated, e.g. `a*w0 - q^2*b*w1`.
pub fn parse_form<S: Scalar>(calc: &CalcRef<S>, q: &S, input: &str) -> Result<FormElement<S>> {
    let toks = crate::ncpoly::tokenize(input)?;
    let mut pos = 0;
    let e = parse_form_sum(calc, q, &toks, &mut pos)?;
    if pos != toks.len() {
        return Err(Error::Parse(format!("trailing input in '{input}'")));
    }
    Ok(e)
}

fn parse_form_sum<S: Scalar>(
    calc: &CalcRef<S>,
    q: &S,
    toks: &[ETok],
    pos: &mut usize,
) -> Result<FormElement<S>> {
    let mut acc: Option<FormElement<S>> = None;
    loop {
        let mut neg = false;
        while *pos < toks.len() {
            match toks[*pos] {
                ETok::Minus => {
                    neg = !neg;
                    *pos += 1;
                }
                ETok::Plus => {
                    *pos += 1;
                }
                _ => break,
            }
        }
        let t = parse_form_product(calc, q, toks, pos)?;
        let t = if neg { t.neg() } else { t };
        acc = Some(match acc {
            None => t,
            Some(a) => {
                if a.is_zero() {
                    t
                } else if t.is_zero() {
                    a
                } else {
                    a.add(&t)?
                }
            }
        });
        if *pos >= toks.len() || !matches!(toks[*pos], ETok::Plus | ETok::Minus) {
            break;
        }
    }
    Ok(acc.unwrap())
}

fn parse_form_product<S: Scalar>(
    calc: &CalcRef<S>,
    q: &S,
    toks: &[ETok],
    pos: &mut usize,
) -> Result<FormElement<S>> {
    let mut acc = parse_form_factor(calc, q, toks, pos)?;
    loop {
        match toks.get(*pos) {
            Some(ETok::Star) => {
                *pos += 1;
                let f = parse_form_factor(calc, q, toks, pos)?;
                acc = acc.wedge(&f)?;
            }
            Some(ETok::Slash) => {
                *pos += 1;
                let d = parse_form_factor(calc, q, toks, pos)?;
                let scalar = if d.degree == 0 && d.terms.len() == 1 {
                    d.terms.get(&(vec![], vec![])).cloned()
                } else {
                    None
                };
                match scalar {
                    Some(c) => acc = acc.scale(&c.inv()),
                    None => return Err(Error::Parse("division by a non-scalar".into())),
                }
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_form_factor<S: Scalar>(
    calc: &CalcRef<S>,
    q: &S,
    toks: &[ETok],
    pos: &mut usize,
) -> Result<FormElement<S>> {
    if *pos >= toks.len() {
        return Err(Error::Parse("unexpected end of input".into()));
    }
    let base = match &toks[*pos] {
        ETok::Int(n) => {
            *pos += 1;
            FormElement::unit(calc).scale(&S::from_int(*n))
        }
        ETok::Ident(id) if id == "q" => {
            *pos += 1;
            FormElement::unit(calc).scale(q)
        }
        ETok::Ident(id) => {
            *pos += 1;
            if let Some(s) = calc.sym_index(id) {
                FormElement::sym(calc, s)
            } else if let Some(g) = calc.alg.gen_index(id) {
                FormElement::from_nc(calc, &NcElement::generator(&calc.alg, g))
            } else {
                return Err(Error::Parse(format!("unknown name '{id}'")));
            }
        }
        ETok::LPar => {
            *pos += 1;
            let e = parse_form_sum(calc, q, toks, pos)?;
            if *pos >= toks.len() || toks[*pos] != ETok::RPar {
                return Err(Error::Parse("expected ')'".into()));
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
            return Err(Error::Parse("expected integer exponent".into()));
        };
        *pos += 1;
        let n = if eneg { -n } else { n };
        if n < 0 {
            if base.degree == 0 && base.terms.len() == 1 {
                if let Some(c) = base.terms.get(&(vec![], vec![])) {
                    return Ok(FormElement::unit(calc).scale(&c.pow_i(n)));
                }
            }
            return Err(Error::Parse("negative power of a non-scalar".into()));
        }
        let mut acc = FormElement::unit(calc);
        for _ in 0..n {
            acc = acc.wedge(&base)?;
        }
        return Ok(acc);
    }
    Ok(base)
}

/// Declarative text rendering of a calculus presentation: symbols with
/// Z-degrees, the d table, the commutation table, the exterior-derivative
/// table and the wedge table.  `parse_calculus` reads the same format.
pub fn render_calculus<S: Scalar>(calc: &CalcRef<S>) -> String {
    let mut out = String::new();
    out.push_str(&format!("calculus {} over {}\n", calc.name, calc.alg.name));
    for s in &calc.syms {
        out.push_str(&format!("sym {} zdeg {}\n", s.name, s.zdeg));
    }
    let show = |t: &FormTerms<S>, deg: usize| -> String {
        let e = FormElement {
            calc: calc.clone(),
            degree: deg,
            terms: t.iter().cloned().collect(),
        };
        e.to_string()
    };
    for g in 0..calc.alg.num_gens() {
        out.push_str(&format!(
            "d {} = {}\n",
            calc.alg.gen_name(g),
            show(&calc.d_gen[g], 1)
        ));
    }
    for s in 0..calc.num_syms() {
        for g in 0..calc.alg.num_gens() {
            out.push_str(&format!(
                "comm {} {} = {}\n",
                calc.sym_name(s),
                calc.alg.gen_name(g),
                show(&calc.comm[s][g], 1)
            ));
        }
    }
    for s in 0..calc.num_syms() {
        match &calc.mc[s] {
            Some(t) => out.push_str(&format!("mc {} = {}\n", calc.sym_name(s), show(t, 2))),
            None => out.push_str(&format!("mc {} = none\n", calc.sym_name(s))),
        }
    }
    for &(x, y) in &calc.wedge.basis2 {
        out.push_str(&format!(
            "wedge basis {}*{}\n",
            calc.sym_name(x as usize),
            calc.sym_name(y as usize)
        ));
    }
    for (&(x, y), v) in &calc.wedge.expand {
        let e = FormElement {
            calc: calc.clone(),
            degree: 2,
            terms: v
                .iter()
                .map(|((u, w), c)| ((vec![], vec![*u, *w]), c.clone()))
                .collect(),
        };
        out.push_str(&format!(
            "wedge {}*{} = {}\n",
            calc.sym_name(x as usize),
            calc.sym_name(y as usize),
            e
        ));
    }
    out.push_str(&format!("complete {}\n", calc.wedge.complete));
    out
}

/// Parse the declarative calculus format produced by [`render_calculus`].
/// The base algebra is resolved by name from the built-in presentations.
pub fn parse_calculus<S: Scalar>(q: &S, input: &str) -> Result<CalcRef<S>> {
    let mut lines = input.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty calculus text".into()))?;
    let hp: Vec<&str> = header.split_whitespace().collect();
    if hp.len() != 4 || hp[0] != "calculus" || hp[2] != "over" {
        return Err(Error::Parse(format!("bad calculus header '{header}'")));
    }
    let name = hp[1].to_string();
    let alg: AlgRef<S> = match hp[3] {
        "slq2" => slq2(q),
        "laurent_z" => laurent_z(),
        other => return Err(Error::Parse(format!("unknown base algebra '{other}'"))),
    };
    let mut syms: Vec<SymInfo> = Vec::new();
    let mut body: Vec<String> = Vec::new();
    for l in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.first() == Some(&"sym") {
            if parts.len() != 4 || parts[2] != "zdeg" {
                return Err(Error::Parse(format!("bad sym line '{l}'")));
            }
            syms.push(SymInfo {
                name: parts[1].to_string(),
                zdeg: parts[3]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad zdeg in '{l}'")))?,
            });
        } else {
            body.push(l.to_string());
        }
    }
    // a provisional calculus with trivial tables lets us reuse the parser
    // for the right hand sides; rebuild with real tables afterwards
    let ngen = alg.num_gens();
    let nsym = syms.len();
    let mut d_gen: Vec<FormTerms<S>> = vec![vec![]; ngen];
    let mut comm: Vec<Vec<FormTerms<S>>> = vec![vec![vec![]; ngen]; nsym];
    let mut mc: Vec<Option<FormTerms<S>>> = vec![None; nsym];
    let mut basis2 = Vec::new();
    let mut expand = BTreeMap::new();
    let mut complete = false;

    // helper calculus whose wedge table accepts every pair as basis, so
    // parse_form can read degree <= 2 right hand sides verbatim
    let all_pairs: Vec<(u8, u8)> = (0..nsym as u8)
        .flat_map(|x| (0..nsym as u8).map(move |y| (x, y)))
        .collect();
    let helper = CalculusPresentation::new(
        &format!("{name}-parse"),
        alg.clone(),
        syms.clone(),
        vec![vec![]; ngen],
        vec![vec![vec![]; ngen]; nsym],
        vec![None; nsym],
        WedgeTable {
            basis2: all_pairs,
            expand: BTreeMap::new(),
            complete: true,
        },
        None,
    )?;

    let terms_of = |s: &str, deg: usize| -> Result<FormTerms<S>> {
        let e = parse_form(&helper, q, s)?;
        if !e.is_zero() && e.degree != deg {
            return Err(Error::Parse(format!("expected degree {deg} in '{s}'")));
        }
        Ok(e.terms.into_iter().collect())
    };

    for l in &body {
        let (head, rhs) = match l.split_once('=') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (l.trim(), None),
        };
        let hp: Vec<&str> = head.split_whitespace().collect();
        match hp.first().copied() {
            Some("d") => {
                let g = alg
                    .gen_index(hp[1])
                    .ok_or_else(|| Error::Parse(format!("unknown generator in '{l}'")))?;
                d_gen[g as usize] = terms_of(rhs.unwrap(), 1)?;
            }
            Some("comm") => {
                let s = syms
                    .iter()
                    .position(|x| x.name == hp[1])
                    .ok_or_else(|| Error::Parse(format!("unknown symbol in '{l}'")))?;
                let g = alg
                    .gen_index(hp[2])
                    .ok_or_else(|| Error::Parse(format!("unknown generator in '{l}'")))?;
                comm[s][g as usize] = terms_of(rhs.unwrap(), 1)?;
            }
            Some("mc") => {
                let s = syms
                    .iter()
                    .position(|x| x.name == hp[1])
                    .ok_or_else(|| Error::Parse(format!("unknown symbol in '{l}'")))?;
                let r = rhs.unwrap();
                mc[s] = if r == "none" { None } else { Some(terms_of(r, 2)?) };
            }
            Some("wedge") => {
                if hp.get(1) == Some(&"basis") {
                    let (x, y) = hp[2]
                        .split_once('*')
                        .ok_or_else(|| Error::Parse(format!("bad wedge basis '{l}'")))?;
                    let xi = syms.iter().position(|s| s.name == x).unwrap() as u8;
                    let yi = syms.iter().position(|s| s.name == y).unwrap() as u8;
                    basis2.push((xi, yi));
                } else {
                    let (x, y) = hp[1]
                        .split_once('*')
                        .ok_or_else(|| Error::Parse(format!("bad wedge line '{l}'")))?;
                    let xi = syms.iter().position(|s| s.name == x).unwrap() as u8;
                    let yi = syms.iter().position(|s| s.name == y).unwrap() as u8;
                    let t = terms_of(rhs.unwrap(), 2)?;
                    let v: Vec<((u8, u8), S)> = t
                        .into_iter()
                        .map(|((w, fw), c)| {
                            debug_assert!(w.is_empty());
                            ((fw[0], fw[1]), c)
                        })
                        .collect();
                    expand.insert((xi, yi), v);
                }
            }
            Some("complete") => {
                complete = hp[1] == "true" || rhs == Some("true");
            }
            _ => return Err(Error::Parse(format!("bad calculus line '{l}'"))),
        }
    }
    CalculusPresentation::new(
        &name,
        alg,
        syms,
        d_gen,
        comm,
        mc,
        WedgeTable { basis2, expand, complete },
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::parse_element;
    use crate::qfield::RatFunc;
    use num_traits::{One, Zero};

    fn q() -> RatFunc {
        RatFunc::q()
    }

    fn c3() -> CalcRef<RatFunc> {
        build_3d(&q())
    }

    fn form(calc: &CalcRef<RatFunc>, s: &str) -> FormElement<RatFunc> {
        parse_form(calc, &q(), s).unwrap()
    }

    #[test]
    fn to_canonical_examples() {
        let calc = c3();
        // w0 a = q^-1 a w0
        let w0 = FormElement::sym(&calc, 0);
        let a = NcElement::generator(&calc.alg, 1);
        let lhs = w0.rmul_nc(&a).unwrap();
        assert!(lhs.equals(&form(&calc, "q^-1*a*w0")));
        // a w1 is already canonical
        let aw1 = form(&calc, "a*w1");
        assert_eq!(aw1.terms.len(), 1);
        // 4D: w2 a = q a w2 - (q - q^-1) b wp + q (q - q^-1)^2 a w1
        let calc4 = build_4d(&q());
        let w2 = FormElement::sym(&calc4, 1);
        let a4 = NcElement::generator(&calc4.alg, 1);
        let got = w2.rmul_nc(&a4).unwrap();
        let want = form(
            &calc4,
            "q*a*w2 - (q - q^-1)*b*wp + q*(q - q^-1)^2*a*w1",
        );
        assert!(got.equals(&want));
    }

    #[test]
    fn wedge_examples() {
        let calc = c3();
        let w0 = FormElement::sym(&calc, 0);
        let w1 = FormElement::sym(&calc, 1);
        let w2 = FormElement::sym(&calc, 2);
        // w2 ^ w0 = -q^2 w0 ^ w2
        let lhs = w2.wedge(&w0).unwrap();
        let rhs = w0.wedge(&w2).unwrap().scale(&(-RatFunc::q_pow(2)));
        assert!(lhs.equals(&rhs));
        assert!(w1.wedge(&w1).unwrap().is_zero());
        // (a w0) ^ (d^2 w2) = q^2 (a d^2) w0 ^ w2
        let aw0 = form(&calc, "a*w0");
        let ddw2 = form(&calc, "d*d*w2");
        let got = aw0.wedge(&ddw2).unwrap();
        let add = parse_element(&calc.alg, &q(), "a*d*d").unwrap();
        let want = FormElement::from_nc(&calc, &add)
            .wedge(&w0.wedge(&w2).unwrap())
            .unwrap()
            .scale(&RatFunc::q_pow(2));
        assert!(got.equals(&want));
        // paper-style: a^2 w0 ^ d^2 w2 = q^2 a^2 d^2 w0 ^ w2
        let a2w0 = form(&calc, "a*a*w0");
        let got2 = a2w0.wedge(&ddw2).unwrap();
        let a2d2 = parse_element(&calc.alg, &q(), "a*a*d*d").unwrap();
        let want2 = FormElement::from_nc(&calc, &a2d2)
            .wedge(&w0.wedge(&w2).unwrap())
            .unwrap()
            .scale(&RatFunc::q_pow(2));
        assert!(got2.equals(&want2));
    }

    #[test]
    fn d_examples() {
        let calc = c3();
        // d b = a w0 - q^2 b w1
        let b = FormElement::from_nc(&calc, &NcElement::generator(&calc.alg, 0));
        assert!(b.d().unwrap().equals(&form(&calc, "a*w0 - q^2*b*w1")));
        // d 1 = 0
        assert!(FormElement::unit(&calc).d().unwrap().is_zero());
        // q d(bc) = a c w0 - q^2 b d w2
        let bc = form(&calc, "b*c");
        let lhs = bc.d().unwrap().scale(&q());
        assert!(lhs.equals(&form(&calc, "a*c*w0 - q^2*b*d*w2")));
    }

    #[test]
    fn d_squared_checks() {
        assert!(d_squared_check(&c3(), 3).all_pass());
        assert!(d_squared_check(&build_h3(&q()), 3).all_pass());
        assert!(d_squared_check(&build_h4(&q()), 3).all_pass());
        // negative control: corrupt the w1 exterior derivative coefficient
        let good = c3();
        let mut mc: Vec<Option<FormTerms<RatFunc>>> =
            (0..3).map(|s| good.mc(s).cloned()).collect();
        mc[1] = Some(vec![((vec![], vec![0, 2]), RatFunc::q_pow(3))]);
        let bad = CalculusPresentation::new(
            "3d-bad",
            good.alg.clone(),
            (0..3)
                .map(|s| SymInfo {
                    name: good.sym_name(s).to_string(),
                    zdeg: good.sym_zdeg(s),
                })
                .collect(),
            (0..4).map(|g| good.d_gen(g).clone()).collect(),
            (0..3)
                .map(|s| (0..4).map(|g| good.comm_rule(s, g).clone()).collect())
                .collect(),
            mc,
            good.wedge_table().clone(),
            None,
        )
        .unwrap();
        assert!(!d_squared_check(&bad, 2).all_pass());
    }

    #[test]
    fn verify_builtin_calculi() {
        assert!(verify_calculus(&c3()).all_pass());
        assert!(verify_calculus(&build_h3(&q())).all_pass());
        assert!(verify_calculus(&build_h4(&q())).all_pass());
        // 4D: degree <= 1 structure checks must pass (no MC table, so d^2
        // on symbols is skipped)
        let r = verify_calculus(&build_4d(&q()));
        let failures: Vec<_> = r
            .failures()
            .iter()
            .map(|c| c.check.clone())
            .collect();
        assert!(failures.iter().all(|c| c.starts_with("d^2 = 0 on")),
            "unexpected 4D failures: {failures:?}");
    }

    #[test]
    fn three_d_top_form() {
        let calc = c3();
        assert_eq!(calc.form_words(3).unwrap(), vec![vec![0, 1, 2]]);
        assert!(calc.form_words(4).unwrap().is_empty());
        // wedge of any 4 symbols is 0
        for s in 0..3u8 {
            let w = FormElement::sym(&calc, s)
                .wedge(&FormElement::sym(&calc, (s + 1) % 3))
                .unwrap()
                .wedge(&FormElement::sym(&calc, (s + 2) % 3))
                .unwrap()
                .wedge(&FormElement::sym(&calc, s))
                .unwrap();
            assert!(w.is_zero());
        }
    }

    #[test]
    fn h_calculus_relation() {
        // dz z = q^-2 z dz for the 3d-induced calculus
        let h = build_h3(&q());
        let z = NcElement::generator(&h.alg, 0);
        let dz = FormElement::from_nc(&h, &z).d().unwrap();
        let lhs = dz.rmul_nc(&z).unwrap();
        let rhs = dz.lmul_nc(&z).unwrap().scale(&RatFunc::q_pow(-2));
        assert!(lhs.equals(&rhs));
        // dz z^-1 = q^-1 z^-1 dz for the 4d-induced calculus
        let h4 = build_h4(&q());
        let zi = NcElement::generator(&h4.alg, 1);
        let dz4 = FormElement::from_nc(&h4, &NcElement::generator(&h4.alg, 0))
            .d()
            .unwrap();
        let lhs = dz4.rmul_nc(&zi).unwrap();
        let rhs = dz4.lmul_nc(&zi).unwrap().scale(&RatFunc::q_pow(-1));
        assert!(lhs.equals(&rhs));
    }

    #[test]
    fn truncated_components() {
        let calc = c3();
        assert_eq!(component_basis(&calc, 1, 0, None).unwrap().dim(), 3);
        // five words of length <= 1 times the top form
        assert_eq!(component_basis(&calc, 3, 1, None).unwrap().dim(), 5);
        // Z-degree filter against direct enumeration
        let cb = component_basis(&calc, 1, 1, Some(0)).unwrap();
        let mut count = 0;
        for w in calc.alg.enumerate_basis(1, None) {
            for s in 0..3 {
                if calc.alg.word_zdeg(&w) + calc.sym_zdeg(s) == 0 {
                    count += 1;
                }
            }
        }
        assert_eq!(cb.dim(), count);
        assert_eq!(cb.dim(), 1);
    }

    #[test]
    fn d_preserves_truncation_and_zdegree() {
        let calc = c3();
        for n in 0..3usize {
            let cb = component_basis(&calc, n, 3, None).unwrap();
            for i in 0..cb.dim() {
                let (w, fw) = cb.keys.key(i);
                let e = cb.element_of(&{
                    let mut v = vec![RatFunc::zero(); cb.dim()];
                    v[i] = RatFunc::one();
                    v
                });
                let de = e.d().unwrap();
                let z = calc.key_zdeg(w, fw);
                for (wk, fwk) in de.terms.keys() {
                    assert!(wk.len() <= 3, "truncation grew under d");
                    assert_eq!(calc.key_zdeg(wk, fwk), z, "d changed the Z-degree");
                }
            }
        }
    }

    #[test]
    fn graded_leibniz() {
        let calc = c3();
        let samples = [
            form(&calc, "a*w0 + q*b*w1"),
            form(&calc, "c*w2"),
            form(&calc, "b*c"),
            form(&calc, "a*w0*w1 - b*w0*w2"),
        ];
        use num_traits::Zero;
        for x in &samples {
            for y in &samples {
                if x.degree + y.degree + 1 > 3 {
                    continue;
                }
                let lhs = x.wedge(y).unwrap().d().unwrap();
                let sign = if x.degree % 2 == 0 {
                    RatFunc::one()
                } else {
                    -RatFunc::one()
                };
                let rhs = x
                    .d()
                    .unwrap()
                    .wedge(y)
                    .unwrap()
                    .add(&x.wedge(&y.d().unwrap()).unwrap().scale(&sign))
                    .unwrap();
                assert!(lhs.sub(&rhs).unwrap().is_zero());
            }
        }
        let _ = RatFunc::zero();
    }

    #[test]
    fn tensor_calculus_signs() {
        // (1 (x) zeta) ^ (w0 (x) 1) = - w0 (x) zeta
        let cx = c3();
        let ch = build_h3(&q());
        let t = tensor_calculus(&cx, &ch, "");
        let zeta = FormElement::sym(&t, 3);
        let w0 = FormElement::sym(&t, 0);
        let lhs = zeta.wedge(&w0).unwrap();
        let rhs = w0.wedge(&zeta).unwrap().neg();
        assert!(lhs.equals(&rhs));
        assert!(verify_calculus(&t).all_pass());
        // bidegree projection
        let mixed = lhs.add(&form(&t, "w0*w1")).unwrap();
        let p11 = mixed.bidegree_component(1).unwrap();
        assert_eq!(p11.terms.len(), 1);
        let p20 = mixed.bidegree_component(2).unwrap();
        assert_eq!(p20.terms.len(), 1);
    }

    #[test]
    fn calculus_round_trip() {
        for calc in [c3(), build_h3(&q()), build_h4(&q()), build_4d(&q())] {
            let text = render_calculus(&calc);
            let parsed = parse_calculus(&q(), &text).unwrap();
            let text2 = render_calculus(&parsed);
            assert_eq!(text, text2, "round trip of {}", calc.name);
        }
    }
}
