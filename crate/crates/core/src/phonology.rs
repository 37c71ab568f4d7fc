//! Phones, phone alphabets, category maps and syllabified words.
//!
//! A word is a sequence of single-character phones. Syllable structure is
//! carried as one boundary bit per inter-phone gap, so an `n`-phone word has
//! exactly `n - 1` bits. The textual form marks each set bit with `-`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Marks a syllable boundary in textual transcriptions.
pub const BOUNDARY_MARKER: char = '-';
/// Starts a comment line in corpus and map files.
pub const COMMENT_MARKER: char = '#';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhonologyError {
    #[error("word has no phones")]
    EmptyWord,
    #[error("malformed boundary in {0:?}: hyphens may not lead, trail or repeat")]
    MalformedBoundary(String),
    #[error("reserved character {0:?} cannot be a phone")]
    ReservedCharacter(char),
    #[error("unknown phone {0:?}")]
    UnknownPhone(Phone),
    #[error("boundary vector has {bits} bits for {phones} phones")]
    ShapeMismatch { phones: usize, bits: usize },
    #[error("category {id} out of range for k = {k}")]
    CategoryOutOfRange { id: usize, k: usize },
    #[error("category count must be at least 1")]
    ZeroCategories,
    #[error("duplicate phone {0:?}")]
    DuplicatePhone(Phone),
    #[error("map file line {line}: {cause}")]
    MapFormat { line: usize, cause: String },
}

/// One phone: a single printable, non-whitespace character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phone(char);

impl Phone {
    pub fn new(symbol: char) -> Result<Self, PhonologyError> {
        if symbol == BOUNDARY_MARKER
            || symbol == COMMENT_MARKER
            || symbol.is_whitespace()
            || symbol.is_control()
        {
            return Err(PhonologyError::ReservedCharacter(symbol));
        }
        Ok(Phone(symbol))
    }

    pub fn symbol(self) -> char {
        self.0
    }
}

impl fmt::Display for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses every character of `text` as a phone (no boundary markers allowed).
pub fn parse_phones(text: &str) -> Result<Vec<Phone>, PhonologyError> {
    let phones = text
        .chars()
        .map(Phone::new)
        .collect::<Result<Vec<_>, _>>()?;
    if phones.is_empty() {
        return Err(PhonologyError::EmptyWord);
    }
    Ok(phones)
}

const NO_INDEX: u32 = u32::MAX;

/// Ordered set of phones; iteration order is insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneAlphabet {
    phones: Vec<Phone>,
    // ASCII phones are looked up by code point, everything else by hash.
    ascii: [u32; 128],
    other: HashMap<Phone, usize>,
}

impl Default for PhoneAlphabet {
    fn default() -> Self {
        PhoneAlphabet {
            phones: Vec::new(),
            ascii: [NO_INDEX; 128],
            other: HashMap::new(),
        }
    }
}

impl PhoneAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `phone` if absent and returns its position.
    pub fn insert(&mut self, phone: Phone) -> usize {
        if let Some(i) = self.index_of(phone) {
            return i;
        }
        let i = self.phones.len();
        self.phones.push(phone);
        match self.ascii.get_mut(phone.0 as usize) {
            Some(slot) => *slot = i as u32,
            None => {
                self.other.insert(phone, i);
            }
        }
        i
    }

    pub fn index_of(&self, phone: Phone) -> Option<usize> {
        match self.ascii.get(phone.0 as usize) {
            Some(&NO_INDEX) => None,
            Some(&i) => Some(i as usize),
            None => self.other.get(&phone).copied(),
        }
    }

    pub fn contains(&self, phone: Phone) -> bool {
        self.index_of(phone).is_some()
    }

    pub fn phone(&self, index: usize) -> Phone {
        self.phones[index]
    }

    pub fn len(&self) -> usize {
        self.phones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phones.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Phone> + '_ {
        self.phones.iter().copied()
    }

    pub fn as_slice(&self) -> &[Phone] {
        &self.phones
    }
}

impl FromIterator<Phone> for PhoneAlphabet {
    fn from_iter<I: IntoIterator<Item = Phone>>(iter: I) -> Self {
        let mut alphabet = PhoneAlphabet::new();
        for phone in iter {
            alphabet.insert(phone);
        }
        alphabet
    }
}

/// Dense category identifier in `[0, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategoryId(pub u16);

impl CategoryId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Total many-to-one assignment of an alphabet's phones to `k` categories.
///
/// This is also the chromosome of the category evolver: one gene per phone,
/// in alphabet order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMap {
    k: usize,
    alphabet: Arc<PhoneAlphabet>,
    genes: Vec<CategoryId>,
}

impl CategoryMap {
    pub fn new(
        k: usize,
        alphabet: Arc<PhoneAlphabet>,
        genes: Vec<CategoryId>,
    ) -> Result<Self, PhonologyError> {
        if k == 0 {
            return Err(PhonologyError::ZeroCategories);
        }
        if genes.len() != alphabet.len() {
            return Err(PhonologyError::ShapeMismatch {
                phones: alphabet.len(),
                bits: genes.len(),
            });
        }
        if let Some(bad) = genes.iter().find(|g| g.index() >= k) {
            return Err(PhonologyError::CategoryOutOfRange { id: bad.index(), k });
        }
        Ok(CategoryMap { k, alphabet, genes })
    }

    /// Each phone in its own category: the no-category baseline.
    pub fn identity(alphabet: Arc<PhoneAlphabet>) -> Self {
        let k = alphabet.len().max(1);
        let genes = (0..alphabet.len()).map(|i| CategoryId(i as u16)).collect();
        CategoryMap { k, alphabet, genes }
    }

    /// Builds a map from explicit `(phone, category)` pairs; alphabet order
    /// follows the pair order.
    pub fn from_pairs<I>(k: usize, pairs: I) -> Result<Self, PhonologyError>
    where
        I: IntoIterator<Item = (Phone, CategoryId)>,
    {
        let mut alphabet = PhoneAlphabet::new();
        let mut genes = Vec::new();
        for (phone, cat) in pairs {
            if alphabet.contains(phone) {
                return Err(PhonologyError::DuplicatePhone(phone));
            }
            alphabet.insert(phone);
            genes.push(cat);
        }
        CategoryMap::new(k, Arc::new(alphabet), genes)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> &Arc<PhoneAlphabet> {
        &self.alphabet
    }

    pub fn genes(&self) -> &[CategoryId] {
        &self.genes
    }

    pub fn category_of(&self, phone: Phone) -> Result<CategoryId, PhonologyError> {
        self.alphabet
            .index_of(phone)
            .map(|i| self.genes[i])
            .ok_or(PhonologyError::UnknownPhone(phone))
    }

    /// Returns a copy with the gene at alphabet position `locus` replaced.
    pub fn with_gene(&self, locus: usize, cat: CategoryId) -> Self {
        assert!(cat.index() < self.k, "category {cat} out of range");
        let mut out = self.clone();
        out.genes[locus] = cat;
        out
    }

    /// Applies `relabel` to every gene; `relabel` must map `[0, k)` into itself.
    pub fn relabeled(&self, relabel: impl Fn(CategoryId) -> CategoryId) -> Self {
        let genes: Vec<_> = self.genes.iter().map(|&g| relabel(g)).collect();
        assert!(genes.iter().all(|g| g.index() < self.k));
        CategoryMap {
            k: self.k,
            alphabet: Arc::clone(&self.alphabet),
            genes,
        }
    }

    /// Genes relabeled by order of first occurrence. Maps that differ only by
    /// a permutation of category ids share the same canonical form.
    pub fn canonical_genes(&self) -> Vec<u16> {
        let mut relabel: Vec<Option<u16>> = vec![None; self.k];
        let mut next = 0u16;
        self.genes
            .iter()
            .map(|g| {
                *relabel[g.index()].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    }

    /// Serializes as `k=<K>` followed by one `phone<TAB>id` line per phone.
    pub fn to_text(&self) -> String {
        let mut out = format!("k={}\n", self.k);
        for (phone, cat) in self.alphabet.iter().zip(&self.genes) {
            out.push_str(&format!("{phone}\t{cat}\n"));
        }
        out
    }

    /// Parses the format written by [`CategoryMap::to_text`]. Blank lines and
    /// `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self, PhonologyError> {
        let mut k = None;
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |cause: String| PhonologyError::MapFormat {
                line: line_no,
                cause,
            };
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with(COMMENT_MARKER) {
                continue;
            }
            if k.is_none() {
                let value = line
                    .trim()
                    .strip_prefix("k=")
                    .ok_or_else(|| err(format!("expected `k=<K>` header, found {line:?}")))?;
                k = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| err(format!("bad category count: {e}")))?,
                );
                continue;
            }
            let (sym, id) = line
                .split_once('\t')
                .ok_or_else(|| err("expected `phone<TAB>category`".into()))?;
            let mut chars = sym.chars();
            let symbol = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(err(format!("phone must be one character, found {sym:?}"))),
            };
            let phone = Phone::new(symbol).map_err(|e| err(e.to_string()))?;
            let id = id
                .trim()
                .parse::<u16>()
                .map_err(|e| err(format!("bad category id: {e}")))?;
            pairs.push((phone, CategoryId(id)));
        }
        let k = k.ok_or(PhonologyError::MapFormat {
            line: 0,
            cause: "missing `k=<K>` header".into(),
        })?;
        CategoryMap::from_pairs(k, pairs)
    }
}

/// A phone sequence with gold boundary bits, as found in a syllabified lexicon.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotatedWord {
    pub orthography: String,
    phones: Vec<Phone>,
    boundaries: Vec<bool>,
}

impl AnnotatedWord {
    pub fn new(
        orthography: impl Into<String>,
        phones: Vec<Phone>,
        boundaries: Vec<bool>,
    ) -> Result<Self, PhonologyError> {
        check_shape(&phones, &boundaries)?;
        Ok(AnnotatedWord {
            orthography: orthography.into(),
            phones,
            boundaries,
        })
    }

    pub fn phones(&self) -> &[Phone] {
        &self.phones
    }

    pub fn boundaries(&self) -> &[bool] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.phones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phones.is_empty()
    }

    pub fn render(&self) -> String {
        render_parts(&self.phones, &self.boundaries)
    }
}

/// Predicted syllable boundaries for a phone sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllabification {
    phones: Vec<Phone>,
    boundaries: Vec<bool>,
}

impl Syllabification {
    pub fn new(phones: Vec<Phone>, boundaries: Vec<bool>) -> Result<Self, PhonologyError> {
        check_shape(&phones, &boundaries)?;
        Ok(Syllabification { phones, boundaries })
    }

    pub fn phones(&self) -> &[Phone] {
        &self.phones
    }

    pub fn boundaries(&self) -> &[bool] {
        &self.boundaries
    }

    pub fn syllable_count(&self) -> usize {
        1 + self.boundaries.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Syllabification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

fn check_shape(phones: &[Phone], boundaries: &[bool]) -> Result<(), PhonologyError> {
    if phones.is_empty() {
        return Err(PhonologyError::EmptyWord);
    }
    if boundaries.len() + 1 != phones.len() {
        return Err(PhonologyError::ShapeMismatch {
            phones: phones.len(),
            bits: boundaries.len(),
        });
    }
    Ok(())
}

/// Parses a hyphen-delimited transcription such as `{b-sEnt`.
pub fn parse_annotated(text: &str) -> Result<(Vec<Phone>, Vec<bool>), PhonologyError> {
    let mut phones = Vec::new();
    let mut boundaries = Vec::new();
    let mut pending_boundary = false;
    for c in text.chars() {
        if c == BOUNDARY_MARKER {
            if phones.is_empty() || pending_boundary {
                return Err(PhonologyError::MalformedBoundary(text.to_string()));
            }
            pending_boundary = true;
            continue;
        }
        let phone = Phone::new(c)?;
        if !phones.is_empty() {
            boundaries.push(pending_boundary);
        }
        pending_boundary = false;
        phones.push(phone);
    }
    if phones.is_empty() {
        return Err(PhonologyError::EmptyWord);
    }
    if pending_boundary {
        return Err(PhonologyError::MalformedBoundary(text.to_string()));
    }
    Ok((phones, boundaries))
}

/// Renders a syllabification with `-` at every boundary.
pub fn render(syllabification: &Syllabification) -> String {
    render_parts(&syllabification.phones, &syllabification.boundaries)
}

fn render_parts(phones: &[Phone], boundaries: &[bool]) -> String {
    let mut out = String::with_capacity(phones.len() * 2);
    for (i, phone) in phones.iter().enumerate() {
        if i > 0 && boundaries[i - 1] {
            out.push(BOUNDARY_MARKER);
        }
        out.push(phone.symbol());
    }
    out
}

/// Replaces every phone with its category.
pub fn categorize(phones: &[Phone], map: &CategoryMap) -> Result<Vec<CategoryId>, PhonologyError> {
    phones.iter().map(|&p| map.category_of(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phones(s: &str) -> Vec<Phone> {
        parse_phones(s).unwrap()
    }

    fn absent_map() -> CategoryMap {
        // b -> b (1); {, E -> a (0); s, n, t -> c (2)
        let pairs = [('{', 0), ('b', 1), ('s', 2), ('E', 0), ('n', 2), ('t', 2)];
        CategoryMap::from_pairs(
            3,
            pairs
                .iter()
                .map(|&(c, id)| (Phone::new(c).unwrap(), CategoryId(id))),
        )
        .unwrap()
    }

    #[test]
    fn parses_absent() {
        let (p, b) = parse_annotated("{b-sEnt").unwrap();
        assert_eq!(p, phones("{bsEnt"));
        assert_eq!(b, vec![false, true, false, false, false]);
    }

    #[test]
    fn parses_single_phone() {
        let (p, b) = parse_annotated("a").unwrap();
        assert_eq!(p, phones("a"));
        assert!(b.is_empty());
    }

    #[test]
    fn rejects_bad_hyphens() {
        for bad in ["-ab", "ab-", "a--b", "-"] {
            assert!(
                matches!(
                    parse_annotated(bad),
                    Err(PhonologyError::MalformedBoundary(_))
                ),
                "{bad}"
            );
        }
        assert_eq!(parse_annotated(""), Err(PhonologyError::EmptyWord));
    }

    #[test]
    fn rejects_reserved_characters() {
        assert_eq!(
            parse_annotated("a#b"),
            Err(PhonologyError::ReservedCharacter('#'))
        );
        assert_eq!(
            parse_annotated("a b"),
            Err(PhonologyError::ReservedCharacter(' '))
        );
        assert!(Phone::new('\t').is_err());
    }

    #[test]
    fn renders() {
        let s = Syllabification::new(phones("{bsEnt"), vec![false, true, false, false, false]);
        assert_eq!(render(&s.unwrap()), "{b-sEnt");
        assert_eq!(
            render(&Syllabification::new(phones("a"), vec![]).unwrap()),
            "a"
        );
        assert_eq!(
            render(&Syllabification::new(phones("ab"), vec![true]).unwrap()),
            "a-b"
        );
    }

    #[test]
    fn shape_is_enforced() {
        assert!(matches!(
            Syllabification::new(phones("ab"), vec![true, false]),
            Err(PhonologyError::ShapeMismatch { phones: 2, bits: 2 })
        ));
        assert_eq!(
            AnnotatedWord::new("", vec![], vec![]),
            Err(PhonologyError::EmptyWord)
        );
    }

    #[test]
    fn categorizes_absent() {
        let cats = categorize(&phones("{bsEnt"), &absent_map()).unwrap();
        let ids: Vec<u16> = cats.iter().map(|c| c.0).collect();
        assert_eq!(ids, vec![0, 1, 2, 0, 2, 2]);
    }

    #[test]
    fn identity_map_gives_distinct_ids_per_phone() {
        let alphabet: PhoneAlphabet = phones("abcab").into_iter().collect();
        let map = CategoryMap::identity(Arc::new(alphabet));
        let cats = categorize(&phones("abcab"), &map).unwrap();
        assert_eq!(
            cats,
            vec![
                CategoryId(0),
                CategoryId(1),
                CategoryId(2),
                CategoryId(0),
                CategoryId(1)
            ]
        );
        assert_eq!(map.k(), 3);
    }

    #[test]
    fn unknown_phone() {
        let err = categorize(&phones("z"), &absent_map()).unwrap_err();
        assert_eq!(err, PhonologyError::UnknownPhone(Phone::new('z').unwrap()));
    }

    #[test]
    fn alphabet_indexes_non_ascii_phones() {
        let alphabet: PhoneAlphabet = phones("aɪəa").into_iter().collect();
        assert_eq!(alphabet.len(), 3);
        assert_eq!(alphabet.index_of(Phone::new('ə').unwrap()), Some(2));
        assert_eq!(alphabet.index_of(Phone::new('z').unwrap()), None);
        assert_eq!(alphabet.index_of(Phone::new('ʊ').unwrap()), None);
    }

    #[test]
    fn alphabet_keeps_first_seen_order() {
        let alphabet: PhoneAlphabet = phones("tattoo").into_iter().collect();
        let order: String = alphabet.iter().map(|p| p.symbol()).collect();
        assert_eq!(order, "tao");
    }

    #[test]
    fn canonical_form_ignores_labels() {
        let map = absent_map();
        let swapped = map.relabeled(|c| CategoryId((c.0 + 1) % 3));
        assert_ne!(map, swapped);
        assert_eq!(map.canonical_genes(), swapped.canonical_genes());
        assert_eq!(map.canonical_genes(), vec![0, 1, 2, 0, 2, 2]);
    }

    #[test]
    fn map_text_round_trip() {
        let map = absent_map();
        let text = map.to_text();
        assert!(text.starts_with("k=3\n{\t0\n"));
        assert_eq!(CategoryMap::from_text(&text).unwrap(), map);
    }

    #[test]
    fn map_text_errors() {
        assert!(matches!(
            CategoryMap::from_text("a\t0\n"),
            Err(PhonologyError::MapFormat { line: 1, .. })
        ));
        assert!(matches!(
            CategoryMap::from_text("k=2\na\t2\n"),
            Err(PhonologyError::CategoryOutOfRange { id: 2, k: 2 })
        ));
        assert!(matches!(
            CategoryMap::from_text("k=2\na\t0\na\t1\n"),
            Err(PhonologyError::DuplicatePhone(_))
        ));
        assert!(matches!(
            CategoryMap::from_text("k=0\n"),
            Err(PhonologyError::ZeroCategories)
        ));
    }
}
