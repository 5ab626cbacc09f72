//! The 13 binary proposition-type flags.

use std::collections::HashSet;

use fancy_regex::Regex;

use super::lexicon::word_forms;
use crate::error::{Error, Result};
use crate::text::{parse_word_list, tokenize};

pub const PROPOSITION_NAMES: [&str; 13] = [
    "question_confusion",
    "question_why_how",
    "question_other",
    "normative",
    "prediction",
    "hypothetical",
    "citation",
    "comparison",
    "example",
    "definition",
    "personal_story",
    "use_of_you",
    "use_of_we",
];

const PERSONAL_STORY: usize = 10;

fn pattern_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "question_confusion" => include_str!("../../resources/lexicons/propositions/question_confusion.txt"),
        "question_why_how" => include_str!("../../resources/lexicons/propositions/question_why_how.txt"),
        "question_other" => include_str!("../../resources/lexicons/propositions/question_other.txt"),
        "normative" => include_str!("../../resources/lexicons/propositions/normative.txt"),
        "prediction" => include_str!("../../resources/lexicons/propositions/prediction.txt"),
        "hypothetical" => include_str!("../../resources/lexicons/propositions/hypothetical.txt"),
        "citation" => include_str!("../../resources/lexicons/propositions/citation.txt"),
        "comparison" => include_str!("../../resources/lexicons/propositions/comparison.txt"),
        "example" => include_str!("../../resources/lexicons/propositions/example.txt"),
        "definition" => include_str!("../../resources/lexicons/propositions/definition.txt"),
        "use_of_you" => include_str!("../../resources/lexicons/propositions/use_of_you.txt"),
        "use_of_we" => include_str!("../../resources/lexicons/propositions/use_of_we.txt"),
        _ => return None,
    })
}

const EPISTEMIC_VERBS: &str = include_str!("../../resources/lexicons/epistemic_verbs.txt");
const EPISTEMIC_NOUNS: &str = include_str!("../../resources/lexicons/epistemic_nouns.txt");

/// Compiles a pattern file: `re:` lines are regexes, other lines are
/// phrases matched on whole tokens.
pub fn compile_patterns(name: &str, source: &str) -> Result<Vec<Regex>> {
    let mut out = Vec::new();
    for line in source.lines() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let pattern = match line.strip_prefix("re:") {
            Some(re) => re.to_string(),
            None => {
                let phrase = tokenize(line).join(" ");
                format!("(^| ){}( |$)", fancy_regex::escape(&phrase))
            }
        };
        let re = Regex::new(&pattern)
            .map_err(|e| Error::Lexicon { name: name.to_string(), message: format!("pattern `{pattern}`: {e}") })?;
        out.push(re);
    }
    if out.is_empty() {
        return Err(Error::Lexicon { name: name.to_string(), message: "no patterns".into() });
    }
    Ok(out)
}

const AUXILIARIES: &[&str] = &[
    "do", "does", "did", "have", "has", "had", "'ve", "'d", "will", "would", "'ll", "can", "could", "ca", "may",
    "might", "must", "shall", "should", "wo", "not", "n't", "never",
];
const BE_FORMS: &[&str] = &["am", "'m", "was", "were", "is", "are", "be", "been"];
const ADVERBS: &[&str] = &[
    "also", "just", "still", "always", "really", "even", "actually", "only", "already", "often", "sometimes", "once",
    "then", "too", "personally", "honestly", "recently", "truly", "usually", "definitely",
];

fn is_adverb(t: &str) -> bool {
    ADVERBS.contains(&t) || (t.len() > 4 && t.ends_with("ly"))
}

fn is_word(t: &str) -> bool {
    t.chars().all(char::is_alphabetic)
}

#[derive(Debug, Clone)]
pub struct PropositionLexicons {
    patterns: Vec<(usize, Vec<Regex>)>,
    epistemic_verbs: HashSet<String>,
    epistemic_nouns: HashSet<String>,
}

impl PropositionLexicons {
    /// The shipped pattern files and epistemic word lists.
    pub fn builtin() -> Result<Self> {
        let mut patterns = Vec::new();
        for (i, name) in PROPOSITION_NAMES.iter().enumerate() {
            if let Some(src) = pattern_source(name) {
                patterns.push((i, compile_patterns(name, src)?));
            }
        }
        Ok(PropositionLexicons {
            patterns,
            epistemic_verbs: parse_word_list(EPISTEMIC_VERBS),
            epistemic_nouns: parse_word_list(EPISTEMIC_NOUNS),
        })
    }

    fn epistemic(set: &HashSet<String>, token: &str) -> bool {
        word_forms(token).iter().any(|f| set.contains(f))
    }

    /// Subject "i" with a non-epistemic verb, or "my" before a
    /// non-epistemic noun.
    pub fn personal_story(&self, tokens: &[String]) -> bool {
        for (i, t) in tokens.iter().enumerate() {
            match t.as_str() {
                "i" => {
                    let mut j = i + 1;
                    while j < tokens.len() && (AUXILIARIES.contains(&tokens[j].as_str()) || is_adverb(&tokens[j])) {
                        j += 1;
                    }
                    let Some(verb) = tokens.get(j) else { continue };
                    if !is_word(verb) {
                        continue;
                    }
                    if BE_FORMS.contains(&verb.as_str()) {
                        let mut k = j + 1;
                        while k < tokens.len() && (AUXILIARIES.contains(&tokens[k].as_str()) || is_adverb(&tokens[k])) {
                            k += 1;
                        }
                        match tokens.get(k) {
                            Some(next) if Self::epistemic(&self.epistemic_verbs, next) => continue,
                            _ => return true,
                        }
                    }
                    if !Self::epistemic(&self.epistemic_verbs, verb) {
                        return true;
                    }
                }
                "my" => {
                    let mut j = i + 1;
                    if tokens.get(j).is_some_and(|t| t == "own") {
                        j += 1;
                    }
                    if let Some(noun) = tokens.get(j) {
                        if is_word(noun) && !Self::epistemic(&self.epistemic_nouns, noun) {
                            return true;
                        }
                    }
                }
                _ => {}
            }
        }
        false
    }

    pub fn flags(&self, tokens: &[String]) -> [bool; 13] {
        let joined = tokens.join(" ");
        let mut out = [false; 13];
        for (i, regexes) in &self.patterns {
            out[*i] = regexes.iter().any(|re| re.is_match(&joined).unwrap_or(false));
        }
        out[PERSONAL_STORY] = self.personal_story(tokens);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(s: &str) -> Vec<&'static str> {
        let lex = PropositionLexicons::builtin().unwrap();
        let f = lex.flags(&tokenize(s));
        PROPOSITION_NAMES.iter().zip(f).filter(|(_, on)| *on).map(|(n, _)| *n).collect()
    }

    #[test]
    fn why_question() {
        let f = flags("Why should I care?");
        assert!(f.contains(&"question_why_how"));
        assert!(f.contains(&"question_other"));
    }

    #[test]
    fn normative_and_we() {
        let f = flags("We must act now.");
        assert!(f.contains(&"normative"));
        assert!(f.contains(&"use_of_we"));
    }

    #[test]
    fn plain_sentence_has_no_flags() {
        assert!(flags("The sky is blue.").is_empty());
    }

    #[test]
    fn confusion_patterns() {
        assert!(flags("I really don't understand this.").contains(&"question_confusion"));
        assert!(flags("That does not make sense.").contains(&"question_confusion"));
        assert!(flags("It makes me wonder.").contains(&"question_confusion"));
    }

    #[test]
    fn prediction_and_contractions() {
        assert!(flags("It's going to rain.").contains(&"prediction"));
        assert!(flags("That won't happen.").contains(&"prediction"));
        assert!(!flags("It's raining.").contains(&"prediction"));
    }

    #[test]
    fn citation_example_comparison_definition() {
        assert!(flags("The report stated that wages fell.").contains(&"citation"));
        assert!(flags("According to the census, it grew.").contains(&"citation"));
        assert!(flags("See https://example.com for data.").contains(&"citation"));
        assert!(flags("Fruit, e.g. apples, is healthy.").contains(&"example"));
        assert!(flags("Cats such as lions roar.").contains(&"example"));
        assert!(flags("Cats are better than dogs.").contains(&"comparison"));
        assert!(flags("Let me define freedom.").contains(&"definition"));
    }

    #[test]
    fn hypothetical() {
        assert!(flags("If it rains, we stay.").contains(&"hypothetical"));
        assert!(flags("We stay, if it rains.").contains(&"hypothetical"));
        assert!(flags("Not unless asked.").contains(&"hypothetical"));
    }

    #[test]
    fn use_of_we_lookbehind() {
        assert!(flags("They told us nothing.").contains(&"use_of_we"));
        assert!(!flags("He lives in the us now.").contains(&"use_of_we"));
        assert!(flags("Your idea is fine.").contains(&"use_of_you"));
    }

    #[test]
    fn personal_story_patterns() {
        assert!(flags("I worked in a factory for years.").contains(&"personal_story"));
        assert!(flags("My brother is a nurse.").contains(&"personal_story"));
        assert!(flags("I am a teacher.").contains(&"personal_story"));
        assert!(!flags("I think taxes are high.").contains(&"personal_story"));
        assert!(!flags("I don't really believe that.").contains(&"personal_story"));
        assert!(!flags("I am not sure.").contains(&"personal_story"));
        assert!(!flags("My opinion is simple.").contains(&"personal_story"));
        assert!(!flags("I thought so.").contains(&"personal_story"));
        assert!(!flags("My views changed.").contains(&"personal_story"));
    }

    #[test]
    fn bad_pattern_is_an_error() {
        assert!(compile_patterns("x", "re:(unclosed").is_err());
        assert!(compile_patterns("x", "\n").is_err());
    }
}
