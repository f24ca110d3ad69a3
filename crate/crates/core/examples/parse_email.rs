//! Parses every message of the fixture mailbox and prints what the
//! indicator rules get to see: sender, subject, links and attachments.
//!
//! ```text
//! cargo run --example parse_email [path/to/mailbox.mbox]
//! ```

use std::path::PathBuf;

use phishkit::email::{parse_email, parse_mbox};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mailbox.mbox"));
    let bytes = std::fs::read(&path)?;
    for raw in parse_mbox(&bytes)? {
        let email = parse_email(&raw)?;
        println!("{} <{}> {:?}", email.sender_domain, email.sender_address, email.subject);
        for link in &email.links {
            let wrapped = if link.wrapped_in_image_or_text { " (wrapped)" } else { "" };
            let ip = if link.host_is_ip_literal { " (ip literal)" } else { "" };
            println!("    link {}{wrapped}{ip}", link.raw_url);
        }
        for a in &email.attachments {
            println!("    attachment {} [.{}]", a.filename, a.extension);
        }
    }
    Ok(())
}
