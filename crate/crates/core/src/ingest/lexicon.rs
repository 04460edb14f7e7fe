use std::collections::HashSet;
use std::path::Path;

use super::{keywords::tokenize, read_file, IngestError};

/// Top-20 financial aspects bundled as the default lexicon.
pub const DEFAULT_ASPECTS: &str = include_str!("../../assets/aspects.txt");

/// Ordered list of aspects, each a lowercase token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectLexicon {
    aspects: Vec<Vec<String>>,
}

impl AspectLexicon {
    pub fn new<I, S>(aspects: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for a in aspects {
            let tokens = tokenize(a.as_ref());
            if tokens.is_empty() {
                return Err(IngestError::Lexicon(format!("aspect '{}' has no tokens", a.as_ref())));
            }
            if !seen.insert(tokens.clone()) {
                return Err(IngestError::Lexicon(format!("duplicate aspect '{}'", tokens.join(" "))));
            }
            out.push(tokens);
        }
        if out.is_empty() {
            return Err(IngestError::Lexicon("no aspects".into()));
        }
        Ok(AspectLexicon { aspects: out })
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        parse_lexicon_text(&read_file(path)?)
    }

    pub fn default_aspects() -> Self {
        parse_lexicon_text(DEFAULT_ASPECTS).expect("bundled lexicon is valid")
    }

    pub fn len(&self) -> usize {
        self.aspects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aspects.is_empty()
    }

    pub fn token_sequences(&self) -> &[Vec<String>] {
        &self.aspects
    }

    /// Aspect names (tokens joined by a single space), in lexicon order.
    pub fn names(&self) -> Vec<String> {
        self.aspects.iter().map(|t| t.join(" ")).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        let tokens = tokenize(name);
        self.aspects.contains(&tokens)
    }
}

/// One entry per line; blank lines and `#` comment lines are skipped.
pub fn parse_lexicon_text(content: &str) -> Result<AspectLexicon, IngestError> {
    AspectLexicon::new(content.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_default_has_twenty_in_table_order() {
        let lex = AspectLexicon::default_aspects();
        assert_eq!(lex.len(), 20);
        let names = lex.names();
        assert_eq!(&names[..4], &["inflation", "economy", "recession", "china"]);
        assert_eq!(names.last().unwrap(), "tax");
    }

    #[test]
    fn comments_and_multiword() {
        let lex = parse_lexicon_text("# header\nInterest Rate\n\nbank\n").unwrap();
        assert_eq!(lex.names(), vec!["interest rate", "bank"]);
        assert!(lex.contains("interest rate"));
        assert!(!lex.contains("interest"));
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(parse_lexicon_text("tax\nTAX\n").is_err());
        assert!(parse_lexicon_text("# only comments\n").is_err());
    }
}
