//! SAN move text: strict export-format writing, lenient reading
//! (check/mate suffixes optional on input).

use super::{Move, Outcome, PieceKind, Position, Square};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SanError {
    #[error("unparseable SAN '{0}'")]
    Malformed(String),
    #[error("SAN '{0}' matches no legal move")]
    NoMatch(String),
    #[error("SAN '{0}' is ambiguous")]
    Ambiguous(String),
}

fn piece_letter(kind: PieceKind) -> Option<char> {
    match kind {
        PieceKind::Pawn => None,
        PieceKind::Knight => Some('N'),
        PieceKind::Bishop => Some('B'),
        PieceKind::Rook => Some('R'),
        PieceKind::Queen => Some('Q'),
        PieceKind::King => Some('K'),
    }
}

pub fn to_san(p: &Position, mv: &Move) -> String {
    let piece = p.piece_at(mv.from).expect("SAN of a legal move");
    let mut out = String::new();

    if mv.is_castle {
        out.push_str(if mv.to.file() == 6 { "O-O" } else { "O-O-O" });
    } else if piece.kind == PieceKind::Pawn {
        if mv.is_capture {
            out.push((b'a' + mv.from.file()) as char);
            out.push('x');
        }
        out.push_str(&mv.to.to_string());
        if let Some(promo) = mv.promotion {
            out.push('=');
            out.push(piece_letter(promo).unwrap());
        }
    } else {
        out.push(piece_letter(piece.kind).unwrap());
        // Export-standard disambiguation: file first, then rank, then both.
        let rivals: Vec<Square> = p
            .legal_moves()
            .iter()
            .filter(|m| {
                m.to == mv.to
                    && m.from != mv.from
                    && p.piece_at(m.from).map(|q| q.kind) == Some(piece.kind)
            })
            .map(|m| m.from)
            .collect();
        if !rivals.is_empty() {
            let file_unique = rivals.iter().all(|s| s.file() != mv.from.file());
            let rank_unique = rivals.iter().all(|s| s.rank() != mv.from.rank());
            if file_unique {
                out.push((b'a' + mv.from.file()) as char);
            } else if rank_unique {
                out.push((b'1' + mv.from.rank()) as char);
            } else {
                out.push_str(&mv.from.to_string());
            }
        }
        if mv.is_capture {
            out.push('x');
        }
        out.push_str(&mv.to.to_string());
    }

    let next = p.apply_move_unchecked(mv);
    if next.in_check() {
        let mated = next.legal_moves().is_empty() && next.outcome() != Outcome::Draw;
        out.push(if mated { '#' } else { '+' });
    }
    out
}

pub fn parse_san(p: &Position, text: &str) -> Result<Move, SanError> {
    let stripped: &str = text.trim_end_matches(['+', '#', '!', '?']);
    if stripped.is_empty() {
        return Err(SanError::Malformed(text.to_string()));
    }
    let legal = p.legal_moves();

    if stripped == "O-O" || stripped == "0-0" {
        return legal
            .into_iter()
            .find(|m| m.is_castle && m.to.file() == 6)
            .ok_or_else(|| SanError::NoMatch(text.to_string()));
    }
    if stripped == "O-O-O" || stripped == "0-0-0" {
        return legal
            .into_iter()
            .find(|m| m.is_castle && m.to.file() == 2)
            .ok_or_else(|| SanError::NoMatch(text.to_string()));
    }

    let mut chars: Vec<char> = stripped.chars().collect();

    let promotion = if chars.len() >= 2 && chars[chars.len() - 2] == '=' {
        let promo = match chars[chars.len() - 1] {
            'N' => PieceKind::Knight,
            'B' => PieceKind::Bishop,
            'R' => PieceKind::Rook,
            'Q' => PieceKind::Queen,
            _ => return Err(SanError::Malformed(text.to_string())),
        };
        chars.truncate(chars.len() - 2);
        Some(promo)
    } else {
        None
    };

    if chars.len() < 2 {
        return Err(SanError::Malformed(text.to_string()));
    }
    let to_text: String = chars[chars.len() - 2..].iter().collect();
    let to = Square::from_name(&to_text).ok_or_else(|| SanError::Malformed(text.to_string()))?;
    chars.truncate(chars.len() - 2);

    let kind = match chars.first() {
        Some('N') => {
            chars.remove(0);
            PieceKind::Knight
        }
        Some('B') => {
            chars.remove(0);
            PieceKind::Bishop
        }
        Some('R') => {
            chars.remove(0);
            PieceKind::Rook
        }
        Some('Q') => {
            chars.remove(0);
            PieceKind::Queen
        }
        Some('K') => {
            chars.remove(0);
            PieceKind::King
        }
        _ => PieceKind::Pawn,
    };

    let capture = if let Some(pos) = chars.iter().position(|&c| c == 'x') {
        chars.remove(pos);
        true
    } else {
        false
    };

    let (mut from_file, mut from_rank) = (None, None);
    for c in chars {
        match c {
            'a'..='h' if from_file.is_none() => from_file = Some(c as u8 - b'a'),
            '1'..='8' if from_rank.is_none() => from_rank = Some(c as u8 - b'1'),
            _ => return Err(SanError::Malformed(text.to_string())),
        }
    }

    let candidates: Vec<Move> = legal
        .into_iter()
        .filter(|m| {
            m.to == to
                && p.piece_at(m.from).map(|q| q.kind) == Some(kind)
                && m.promotion == promotion
                && from_file.map_or(true, |f| m.from.file() == f)
                && from_rank.map_or(true, |r| m.from.rank() == r)
                && (!capture || m.is_capture)
        })
        .collect();

    match candidates.as_slice() {
        [] => Err(SanError::NoMatch(text.to_string())),
        [mv] => Ok(*mv),
        _ => Err(SanError::Ambiguous(text.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::super::Position;

    #[test]
    fn round_trip_over_game_line() {
        let mut p = Position::start();
        for san in ["e4", "e5", "Nf3", "Nc6", "Bb5", "a6", "Bxc6", "dxc6", "O-O"] {
            let mv = p.parse_san(san).unwrap();
            let strict = p.san(&mv);
            assert_eq!(p.parse_san(&strict).unwrap(), mv);
            p = p.apply_move(&mv).unwrap();
        }
    }

    #[test]
    fn disambiguation_by_file_and_rank() {
        // Two knights can reach d2: b1 and f3.
        let p = Position::from_fen("4k3/8/8/8/8/5N2/8/1N2K3 w - - 0 1").unwrap();
        let m1 = p.parse_san("Nbd2").unwrap();
        let m2 = p.parse_san("Nfd2").unwrap();
        assert_ne!(m1.from, m2.from);
        assert!(p.parse_san("Nd2").is_err());
        assert_eq!(p.san(&m1), "Nbd2");
    }

    #[test]
    fn lenient_check_marks() {
        let p = Position::from_fen("6k1/5ppp/8/8/8/8/8/4R1K1 w - - 0 1").unwrap();
        let strict = p.parse_san("Re8#").unwrap();
        let lenient = p.parse_san("Re8").unwrap();
        assert_eq!(strict, lenient);
        assert_eq!(p.san(&strict), "Re8#");
    }

    #[test]
    fn promotion_san() {
        let p = Position::from_fen("8/4P2k/8/8/8/8/8/4K3 w - - 0 1").unwrap();
        let mv = p.parse_san("e8=N").unwrap();
        assert_eq!(mv.to_uci(), "e7e8n");
        assert_eq!(p.san(&mv), "e8=N");
    }
}
