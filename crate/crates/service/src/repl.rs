//! Terminal front end. Typing a button's number presses it.

use tokio::io::{AsyncBufRead, AsyncBufReadExt, AsyncWrite, AsyncWriteExt};

use crate::engine::{TurnInput, TurnResponse};
use crate::error::ServiceError;
use crate::service::Service;

pub struct Repl<'a> {
    service: &'a Service,
    session_id: String,
    last: TurnResponse,
}

impl<'a> Repl<'a> {
    pub async fn start(service: &'a Service, seed: Option<u64>) -> Result<(Self, TurnResponse), ServiceError> {
        let first = service.create_session(seed).await?;
        let repl = Repl {
            service,
            session_id: first.session_id.clone(),
            last: first.clone(),
        };
        Ok((repl, first))
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    /// Buttons of the latest response, numbered from 1 on screen.
    pub fn buttons(&self) -> &[cinebot_core::nlg::ButtonSpec] {
        &self.last.buttons
    }

    /// Maps a typed line to an input: a number selects a button.
    pub fn input_for(&self, line: &str) -> TurnInput {
        let trimmed = line.trim();
        if let Ok(n) = trimmed.parse::<usize>() {
            if let Some(b) = n.checked_sub(1).and_then(|i| self.last.buttons.get(i)) {
                return TurnInput::Payload(b.payload.clone());
            }
        }
        TurnInput::Text(trimmed.to_string())
    }

    pub async fn send(&mut self, line: &str) -> Result<TurnResponse, ServiceError> {
        let input = self.input_for(line);
        let response = self.service.post_turn(&self.session_id, input).await?;
        self.last = response.clone();
        Ok(response)
    }
}

/// Formats a response the way the terminal shows it.
pub fn render(response: &TurnResponse) -> String {
    let mut out = String::new();
    for u in &response.utterances {
        out.push_str(&format!("cinebot> {u}\n"));
    }
    if let Some(card) = &response.recommendation {
        out.push_str(&format!("         {} ({}), rated {:.1}\n", card.title, card.year, card.rating));
        if !card.item_url.is_empty() {
            out.push_str(&format!("         {}\n", card.item_url));
        }
    }
    if let Some(recap) = &response.recap {
        out.push_str(&format!("         ({recap})\n"));
    }
    for (i, b) in response.buttons.iter().enumerate() {
        out.push_str(&format!("  [{}] {}\n", i + 1, b.label));
    }
    out
}

/// Runs a conversation over the given streams until the agent says goodbye
/// or the input ends.
pub async fn run<R, W>(service: &Service, seed: Option<u64>, input: R, mut output: W) -> anyhow::Result<()>
where
    R: AsyncBufRead + Unpin,
    W: AsyncWrite + Unpin,
{
    let (mut repl, first) = Repl::start(service, seed).await?;
    output.write_all(render(&first).as_bytes()).await?;
    output.write_all(b"you> ").await?;
    output.flush().await?;
    let mut lines = input.lines();
    while let Some(line) = lines.next_line().await? {
        if line.trim().is_empty() {
            output.write_all(b"you> ").await?;
            output.flush().await?;
            continue;
        }
        match repl.send(&line).await {
            Ok(response) => {
                output.write_all(render(&response).as_bytes()).await?;
                if response.closed {
                    break;
                }
            }
            Err(e) => output.write_all(format!("error: {e}\n").as_bytes()).await?,
        }
        output.write_all(b"you> ").await?;
        output.flush().await?;
    }
    output.flush().await?;
    Ok(())
}
