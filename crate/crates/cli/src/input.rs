//! Text format for substitutions and directive sequences.
//!
//! ```text
//! # Fibonacci
//! alphabet: a b
//! a -> a b
//! b -> a
//! ```
//!
//! Images are whitespace-separated tokens. When every letter is a single
//! character an image may also be written run together (`a->ab`). A file
//! with `[name]` headers declares a morphism family instead; it must end
//! with `directive:` (names, optionally `name^k`) and may give `seed:`.

use std::fmt;
use std::sync::Arc;

use subshift::sadic::DirectiveSequence;
use subshift::{Alphabet, Morphism, Word};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Morphism(Morphism),
    Directive(DirectiveSequence),
}

/// One non-blank, non-comment line with its 1-based number and the column
/// at which `text` starts.
#[derive(Debug, Clone, Copy)]
struct Line<'a> {
    number: usize,
    column: usize,
    text: &'a str,
}

impl Line<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.number, column: self.column + offset, message: message.into() }
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim_start();
            let column = body.len() - trimmed.len() + 1;
            let text = trimmed.trim_end();
            (!text.is_empty()).then_some(Line { number: i + 1, column, text })
        })
        .collect()
}

/// Byte offset of `part` inside `whole`; both must come from the same string.
fn offset_in(whole: &str, part: &str) -> usize {
    part.as_ptr() as usize - whole.as_ptr() as usize
}

pub fn parse_input(text: &str) -> Result<Input, ParseError> {
    let lines = lines(text);
    if lines.iter().any(|l| l.text.starts_with('[')) {
        parse_directive(&lines).map(Input::Directive)
    } else {
        parse_rules(&lines, None).map(Input::Morphism)
    }
}

pub fn parse_morphism(text: &str) -> Result<Morphism, ParseError> {
    match parse_input(text)? {
        Input::Morphism(m) => Ok(m),
        Input::Directive(_) => Err(ParseError {
            line: 1,
            column: 1,
            message: "expected a substitution, found a directive sequence".into(),
        }),
    }
}

fn parse_rules(lines: &[Line<'_>], context: Option<&str>) -> Result<Morphism, ParseError> {
    let missing_block = |message: String| ParseError {
        line: lines.first().map_or(1, |l| l.number),
        column: 1,
        message: match context {
            Some(name) => format!("[{name}]: {message}"),
            None => message,
        },
    };
    let mut declared: Option<Vec<String>> = None;
    let mut rules: Vec<(Line<'_>, &str, &str)> = Vec::new();
    for line in lines {
        if let Some(rest) = line.text.strip_prefix("alphabet:") {
            if declared.is_some() {
                return Err(line.error(0, "duplicate alphabet line"));
            }
            if !rules.is_empty() {
                return Err(line.error(0, "alphabet line must precede the rules"));
            }
            let tokens: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if tokens.is_empty() {
                return Err(line.error(0, "empty alphabet"));
            }
            declared = Some(tokens);
            continue;
        }
        let Some((lhs, rhs)) = line.text.split_once("->") else {
            return Err(line.error(0, "expected `letter -> image`"));
        };
        let letter = lhs.trim();
        if letter.is_empty() || letter.contains(char::is_whitespace) {
            return Err(line.error(0, "expected a single letter before `->`"));
        }
        rules.push((*line, letter, rhs));
    }
    if rules.is_empty() {
        return Err(missing_block("no rules".into()));
    }

    let tokens = match declared {
        Some(t) => t,
        None => {
            let mut seen: Vec<String> = Vec::new();
            for (_, l, _) in &rules {
                if !seen.iter().any(|t| t == l) {
                    seen.push(l.to_string());
                }
            }
            seen
        }
    };
    let alphabet = Alphabet::new(tokens.iter().map(String::as_str))
        .map_err(|e| missing_block(e.to_string()))?;

    let mut images: Vec<Option<Word>> = vec![None; alphabet.len()];
    for (line, letter, rhs) in &rules {
        let at = offset_in(line.text, letter);
        let Some(index) = alphabet.letter(letter) else {
            return Err(line.error(at, format!("`{letter}` is not in the alphabet")));
        };
        if images[index as usize].is_some() {
            return Err(line.error(at, format!("duplicate rule for `{letter}`")));
        }
        let image = rhs.trim();
        let image_at = offset_in(line.text, rhs) + (rhs.len() - rhs.trim_start().len());
        if image.is_empty() {
            return Err(line.error(image_at, format!("empty image for `{letter}`")));
        }
        images[index as usize] = Some(parse_image(&alphabet, image, line, image_at)?);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, w)| w.ok_or_else(|| missing_block(format!("no image for `{}`", tokens[i]))))
        .collect::<Result<Vec<_>, _>>()?;
    Morphism::new(Arc::clone(&alphabet), alphabet, images).map_err(|e| missing_block(e.to_string()))
}

fn parse_image(
    alphabet: &Arc<Alphabet>,
    image: &str,
    line: &Line<'_>,
    at: usize,
) -> Result<Word, ParseError> {
    let spaced = image.contains(char::is_whitespace);
    if !spaced && !alphabet.is_compact() && alphabet.letter(image).is_none() {
        return Err(line.error(
            at,
            format!("`{image}` is not a letter; separate tokens with spaces for multi-character letters"),
        ));
    }
    if spaced || !alphabet.is_compact() {
        for token in image.split_whitespace() {
            if alphabet.letter(token).is_none() {
                let col = at + offset_in(image, token);
                return Err(line.error(col, format!("unknown letter `{token}`")));
            }
        }
    } else if let Some((i, c)) = image.char_indices().find(|(_, c)| alphabet.letter(&c.to_string()).is_none()) {
        return Err(line.error(at + i, format!("unknown letter `{c}`")));
    }
    alphabet.parse_word(image).map_err(|e| line.error(at, e.to_string()))
}

fn parse_directive(lines: &[Line<'_>]) -> Result<DirectiveSequence, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut family: Vec<Morphism> = Vec::new();
    let mut block: Vec<Line<'_>> = Vec::new();
    let mut current: Option<(Line<'_>, String)> = None;
    let mut directive: Option<(Line<'_>, Vec<usize>)> = None;
    let mut seed: Option<(Line<'_>, String)> = None;

    let close = |current: &mut Option<(Line<'_>, String)>,
                     block: &mut Vec<Line<'_>>,
                     names: &mut Vec<String>,
                     family: &mut Vec<Morphism>|
     -> Result<(), ParseError> {
        if let Some((header, name)) = current.take() {
            if block.is_empty() {
                return Err(header.error(0, format!("[{name}] has no rules")));
            }
            family.push(parse_rules(block, Some(&name))?);
            names.push(name);
            block.clear();
        }
        Ok(())
    };

    for line in lines {
        if let Some(rest) = line.text.strip_prefix('[') {
            close(&mut current, &mut block, &mut names, &mut family)?;
            if directive.is_some() {
                return Err(line.error(0, "morphism block after the directive line"));
            }
            let Some(name) = rest.strip_suffix(']').map(str::trim) else {
                return Err(line.error(0, "expected `[name]`"));
            };
            if name.is_empty() || name.contains(char::is_whitespace) || name.contains('^') {
                return Err(line.error(1, "invalid morphism name"));
            }
            if names.iter().any(|n| n == name) {
                return Err(line.error(1, format!("duplicate morphism `{name}`")));
            }
            current = Some((*line, name.to_string()));
        } else if let Some(rest) = line.text.strip_prefix("directive:") {
            close(&mut current, &mut block, &mut names, &mut family)?;
            if directive.is_some() {
                return Err(line.error(0, "duplicate directive line"));
            }
            let mut indices = Vec::new();
            for item in rest.split_whitespace() {
                let col = offset_in(line.text, item);
                let (name, power) = match item.split_once('^') {
                    Some((n, k)) => {
                        let k: usize = k
                            .parse()
                            .map_err(|_| line.error(col, format!("invalid power in `{item}`")))?;
                        (n, k)
                    }
                    None => (item, 1),
                };
                let Some(index) = names.iter().position(|n| n == name) else {
                    return Err(line.error(col, format!("unknown morphism `{name}`")));
                };
                indices.extend(std::iter::repeat_n(index, power));
            }
            if indices.is_empty() {
                return Err(line.error(0, "empty directive"));
            }
            directive = Some((*line, indices));
        } else if let Some(rest) = line.text.strip_prefix("seed:") {
            if seed.is_some() {
                return Err(line.error(0, "duplicate seed line"));
            }
            seed = Some((*line, rest.trim().to_string()));
        } else if current.is_some() {
            block.push(*line);
        } else {
            return Err(line.error(0, "expected `[name]`, `directive:` or `seed:`"));
        }
    }
    close(&mut current, &mut block, &mut names, &mut family)?;

    let Some((directive_line, indices)) = directive else {
        return Err(ParseError {
            line: lines.last().map_or(1, |l| l.number),
            column: 1,
            message: "missing `directive:` line".into(),
        });
    };
    let innermost = family[*indices.last().expect("non-empty")].domain();
    let seed_letter = match seed {
        Some((line, token)) => innermost
            .letter(&token)
            .ok_or_else(|| line.error(0, format!("seed `{token}` is not a letter")))?,
        None => 0,
    };
    DirectiveSequence::new(names, family, indices, seed_letter)
        .map_err(|e| directive_line.error(0, e.to_string()))
}

/// Prints a morphism in the input format; [`parse_morphism`] reads it back.
pub struct Rules<'a>(pub &'a Morphism);

impl fmt::Display for Rules<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        writeln!(f, "alphabet: {}", m.domain().tokens().join(" "))?;
        for letter in m.domain().letters() {
            let image: Vec<&str> =
                m.image(letter).letters().iter().map(|&l| m.codomain().token(l)).collect();
            writeln!(f, "{} -> {}", m.domain().token(letter), image.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spaced_form() {
        let m = parse_morphism("alphabet: a b\na -> a b a\nb -> b a a b\n").unwrap();
        assert_eq!(m, Morphism::from_pairs(&[("a", "aba"), ("b", "baab")]).unwrap());
    }

    #[test]
    fn compact_form_and_comments() {
        let m = parse_morphism("# Fibonacci\na->ab\nb->a   # trailing\n").unwrap();
        assert_eq!(m, Morphism::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap());
    }

    #[test]
    fn multi_character_letters() {
        let text = "alphabet: (1,1) (1,2) (2,1)\n(1,1) -> (1,1) (1,2)\n(1,2) -> (1,1) (1,2) (2,1) (1,1) (1,2)\n(2,1) -> (1,1) (1,2) (2,1)\n";
        let m = parse_morphism(text).unwrap();
        assert_eq!(m.image_len(1), 5);
        let err = parse_morphism("alphabet: xy z\nxy -> xyz\nz -> xy\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 7));
    }

    #[test]
    fn rejects_bad_input() {
        let err = parse_morphism("a -> \nb -> a\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("empty image"));

        let err = parse_morphism("a -> ab\na -> b\nb -> a\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
        assert!(err.message.contains("duplicate"));

        let err = parse_morphism("alphabet: a b c\na -> ab\nb -> a\n").unwrap_err();
        assert!(err.message.contains("no image for `c`"));

        let err = parse_morphism("a -> ac\nb -> a\n").unwrap_err();
        assert_eq!((err.line, err.column, err.message.as_str()), (1, 7, "unknown letter `c`"));

        let err = parse_morphism("alphabet: a a\na -> a\n").unwrap_err();
        assert_eq!(err.line, 1);

        let err = parse_morphism("a => b\n").unwrap_err();
        assert!(err.message.contains("->"));
    }

    #[test]
    fn round_trip() {
        for text in ["a->aba\nb->baab", "alphabet: x10 y\nx10 -> x10 y\ny -> x10\n"] {
            let m = parse_morphism(text).unwrap();
            let printed = Rules(&m).to_string();
            assert_eq!(parse_morphism(&printed).unwrap(), m);
            assert_eq!(Rules(&parse_morphism(&printed).unwrap()).to_string(), printed);
        }
    }

    #[test]
    fn directive_file() {
        let text = "[tau]\n0 -> 0\n1 -> 1 0\n[sigma]\n0 -> 0 1\n1 -> 1\ndirective: tau sigma^2 tau\nseed: 0\n";
        let Input::Directive(d) = parse_input(text).unwrap() else { panic!("expected directive") };
        assert_eq!(d.directive(), [0, 1, 1, 0]);
        assert_eq!(d.names(), ["tau", "sigma"]);

        let err = parse_input("[tau]\n0 -> 0\n1 -> 10\ndirective: tau rho\n").unwrap_err();
        assert_eq!((err.line, err.column), (4, 16));
        assert!(parse_input("[tau]\n0 -> 0\n1 -> 10\n").is_err());
        assert!(parse_morphism(text).is_err());
    }
}
