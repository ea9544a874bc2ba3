//! Line-delimited JSON transcripts.
//!
//! The first line is a header with the protocol parameters and spacetime
//! configuration, then one line per round, then a footer with the reveal
//! and verdict. Every line carries `digest`, a SHA-256 chain:
//! `digest_i = H(digest_{i-1} || line_i with an empty digest)`, starting
//! from 32 zero bytes. An edited line breaks the chain at that line.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::gf::{FieldConfig, FieldSpec};
use crate::protocol::{Location, ProtocolParams, RoundRecord, Transcript, Verdict};
use crate::spacetime::{self, Event, EventKind, SpacetimeConfig, Violation};

pub const FORMAT: &str = "relcommit-transcript/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeaderLine {
    #[serde(rename = "type")]
    pub line_type: String,
    pub format: String,
    pub field: FieldConfig,
    pub rounds: usize,
    pub strict: bool,
    pub spacetime: SpacetimeConfig,
    pub mode: String,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordLine {
    #[serde(rename = "type")]
    pub line_type: String,
    pub index: usize,
    pub location: u8,
    pub challenge_hex: String,
    pub response_hex: String,
    pub challenge_time_seconds: f64,
    pub emit_time_seconds: f64,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FooterLine {
    #[serde(rename = "type")]
    pub line_type: String,
    pub revealed_bit: u8,
    pub revealed_ak_hex: String,
    pub reveal_time_seconds: f64,
    pub verdict: String,
    pub violations: Vec<usize>,
    pub digest: String,
}

trait Chained: Serialize + Clone {
    fn digest_mut(&mut self) -> &mut String;

    fn body(&self) -> Vec<u8> {
        let mut copy = self.clone();
        copy.digest_mut().clear();
        serde_json::to_vec(&copy).expect("line serializes")
    }

    fn seal(&mut self, prev: &[u8; 32]) -> [u8; 32] {
        let d = chain(prev, &self.body());
        *self.digest_mut() = hex::encode(d);
        d
    }
}

impl Chained for HeaderLine {
    fn digest_mut(&mut self) -> &mut String {
        &mut self.digest
    }
}
impl Chained for RecordLine {
    fn digest_mut(&mut self) -> &mut String {
        &mut self.digest
    }
}
impl Chained for FooterLine {
    fn digest_mut(&mut self) -> &mut String {
        &mut self.digest
    }
}

fn chain(prev: &[u8; 32], body: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(prev);
    h.update(body);
    h.finalize().into()
}

/// Renders a sealed transcript. The transcript must be complete and
/// carry a reveal.
pub fn render(
    transcript: &Transcript,
    spacetime: &SpacetimeConfig,
    mode: &str,
    reveal_time: f64,
    verdict: Verdict,
    violations: &[Violation],
) -> Result<String, HarnessError> {
    let params = transcript.params();
    let (bit, ak) = match (transcript.revealed_bit, &transcript.revealed_ak) {
        (Some(b), Some(ak)) => (b, ak),
        _ => return Err(HarnessError::Config("transcript has no reveal".into())),
    };
    let mut out = String::new();
    let mut push = |json: String| {
        out.push_str(&json);
        out.push('\n');
    };
    let mut prev = [0u8; 32];
    let mut header = HeaderLine {
        line_type: "header".into(),
        format: FORMAT.into(),
        field: FieldConfig::from(&**params.field()),
        rounds: params.rounds(),
        strict: params.strict(),
        spacetime: *spacetime,
        mode: mode.into(),
        digest: String::new(),
    };
    prev = header.seal(&prev);
    push(to_json(&header));
    for r in transcript.records() {
        let mut line = RecordLine {
            line_type: "record".into(),
            index: r.index,
            location: r.location.number(),
            challenge_hex: r.challenge.to_hex(),
            response_hex: r.response.to_hex(),
            challenge_time_seconds: r.challenge_time,
            emit_time_seconds: r.emit_time,
            digest: String::new(),
        };
        prev = line.seal(&prev);
        push(to_json(&line));
    }
    let mut footer = FooterLine {
        line_type: "footer".into(),
        revealed_bit: bit as u8,
        revealed_ak_hex: ak.to_hex(),
        reveal_time_seconds: reveal_time,
        verdict: verdict.as_str().into(),
        violations: violations.iter().map(|v| v.round).collect(),
        digest: String::new(),
    };
    footer.seal(&prev);
    push(to_json(&footer));
    Ok(out)
}

fn to_json<T: Serialize>(line: &T) -> String {
    serde_json::to_string(line).expect("line serializes")
}

/// Result of re-verifying a transcript file.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub transcript: Transcript,
    pub spacetime: SpacetimeConfig,
    pub mode: String,
    /// Verdict of the reveal check alone.
    pub reveal_check: Verdict,
    pub violations: Vec<Violation>,
    /// Reveal check and timing together.
    pub verdict: Verdict,
    pub recorded_verdict: Verdict,
}

fn parse_line<T: for<'de> Deserialize<'de>>(text: &str, part: Part) -> Result<T, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Tampered { part, kind: "parse", detail: e.to_string() })
}

fn check_digest<T: Chained>(line: &T, claimed: &str, prev: &[u8; 32], part: Part) -> Result<[u8; 32], HarnessError> {
    let d = chain(prev, &line.body());
    if hex::encode(d) != claimed {
        return Err(HarnessError::Tampered { part, kind: "digest", detail: "digest chain broken".into() });
    }
    Ok(d)
}

/// Where in a transcript a problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Header,
    Round(usize),
    Footer,
}

fn verdict_from(s: &str) -> Result<Verdict, HarnessError> {
    match s {
        "accept" => Ok(Verdict::Accept),
        "reject" => Ok(Verdict::Reject),
        other => Err(HarnessError::Tampered { part: Part::Footer, kind: "parse", detail: format!("verdict {other}") }),
    }
}

/// Schedule events implied by a transcript's records and reveal time.
pub fn schedule_of(records: &[RoundRecord], reveal_time: f64) -> Vec<Event> {
    let mut events = Vec::with_capacity(2 * records.len() + 1);
    for r in records {
        events.push(Event { round: r.index, location: r.location, time_s: r.challenge_time, kind: EventKind::ChallengeSent });
        events.push(Event { round: r.index, location: r.location, time_s: r.emit_time, kind: EventKind::ResponseSent });
    }
    events.push(Event { round: records.len(), location: Location::One, time_s: reveal_time, kind: EventKind::Reveal });
    events
}

/// Parses a transcript file, checks the digest chain and encodings,
/// recomputes the reveal check, and re-validates the timing.
pub fn verify_text(text: &str) -> Result<VerifyReport, HarnessError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut prev = [0u8; 32];

    let header: HeaderLine = parse_line(lines.next().unwrap_or(""), Part::Header)?;
    prev = check_digest(&header, &header.digest, &prev, Part::Header)?;
    if header.line_type != "header" || header.format != FORMAT {
        return Err(HarnessError::Tampered { part: Part::Header, kind: "parse", detail: "not a transcript header".into() });
    }
    let field = header.field.build()?;
    let params = ProtocolParams::new(field.clone(), header.rounds, header.strict)?;
    header.spacetime.validate()?;
    let mut transcript = Transcript::new(params);

    let rest: Vec<&str> = lines.collect();
    if rest.len() != header.rounds + 1 {
        return Err(HarnessError::Tampered {
            part: Part::Footer,
            kind: "length",
            detail: format!("{} lines after the header, expected {}", rest.len(), header.rounds + 1),
        });
    }
    for (i, text) in rest[..header.rounds].iter().enumerate() {
        let part = Part::Round(i + 1);
        let line: RecordLine = parse_line(text, part)?;
        prev = check_digest(&line, &line.digest, &prev, part)?;
        let elem = |s: &str| {
            field_element(&field, s).map_err(|e| HarnessError::Tampered { part, kind: "encoding", detail: e.to_string() })
        };
        let location = Location::from_number(line.location)
            .ok_or_else(|| HarnessError::Tampered { part, kind: "location", detail: format!("location {}", line.location) })?;
        transcript
            .push(RoundRecord {
                index: line.index,
                location,
                challenge: elem(&line.challenge_hex)?,
                response: elem(&line.response_hex)?,
                challenge_time: line.challenge_time_seconds,
                emit_time: line.emit_time_seconds,
            })
            .map_err(|e| HarnessError::Tampered { part, kind: "order", detail: e.to_string() })?;
    }
    let footer: FooterLine = parse_line(rest[header.rounds], Part::Footer)?;
    check_digest(&footer, &footer.digest, &prev, Part::Footer)?;
    let bit = match footer.revealed_bit {
        0 => false,
        1 => true,
        other => return Err(HarnessError::Tampered { part: Part::Footer, kind: "parse", detail: format!("bit {other}") }),
    };
    let ak = field_element(&field, &footer.revealed_ak_hex)
        .map_err(|e| HarnessError::Tampered { part: Part::Footer, kind: "encoding", detail: e.to_string() })?;
    transcript.set_reveal(bit, ak);
    let recorded_verdict = verdict_from(&footer.verdict)?;

    let reveal_check = transcript.verify()?;
    let events = schedule_of(transcript.records(), footer.reveal_time_seconds);
    let violations = spacetime::validate_schedule(&events, &header.spacetime)?;
    let verdict = if reveal_check.is_accept() && violations.is_empty() { Verdict::Accept } else { Verdict::Reject };
    if verdict != recorded_verdict {
        return Err(HarnessError::Tampered {
            part: Part::Footer,
            kind: "verdict_mismatch",
            detail: format!("recorded {}, recomputed {}", recorded_verdict.as_str(), verdict.as_str()),
        });
    }
    Ok(VerifyReport {
        transcript,
        spacetime: header.spacetime,
        mode: header.mode,
        reveal_check,
        violations,
        verdict,
        recorded_verdict,
    })
}

fn field_element(field: &std::sync::Arc<FieldSpec>, s: &str) -> Result<crate::gf::FieldElement, crate::gf::GfError> {
    field.from_hex(s)
}
