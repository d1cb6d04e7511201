use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use stp_core::kernel::RuleLibrary;
use stp_core::policy::{external_generate, PromptRecord};
use stp_core::Kernel;

/// Serves one connection: reads `n` request lines, then writes whatever
/// `respond` returns for the collected `(id, prompt_text)` pairs.
fn stub<F>(n: usize, respond: F) -> (String, thread::JoinHandle<()>)
where
    F: FnOnce(Vec<(usize, String)>) -> Vec<String> + Send + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let handle = thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut requests = Vec::new();
        for _ in 0..n {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            let v: serde_json::Value = serde_json::from_str(&line).unwrap();
            requests.push((v["id"].as_u64().unwrap() as usize, v["prompt_text"].as_str().unwrap().to_string()));
        }
        for line in respond(requests) {
            stream.write_all(line.as_bytes()).unwrap();
            stream.write_all(b"\n").unwrap();
        }
    });
    (addr, handle)
}

fn reply(id: usize, text: &str) -> String {
    serde_json::json!({ "id": id, "completion": text }).to_string()
}

fn prompts(n: usize) -> Vec<PromptRecord> {
    let kernel = Kernel::standard();
    (0..n).map(|i| PromptRecord::prover(kernel.parse_statement(&format!("(a + {i}) = ({i} + a)")).unwrap())).collect()
}

#[test]
fn echo_server_fills_every_item() {
    let (addr, h) = stub(4, |reqs| reqs.iter().map(|(id, _)| reply(*id, "refl")).collect());
    let out = external_generate(RuleLibrary::standard(), &prompts(4), &addr, Duration::from_secs(5)).unwrap();
    h.join().unwrap();
    assert_eq!(out, vec!["refl"; 4]);
}

#[test]
fn malformed_item_is_isolated() {
    let (addr, h) = stub(5, |reqs| {
        reqs.iter()
            .map(|(id, _)| if *id == 2 { "{\"id\": 2, \"completion\": ".to_string() } else { reply(*id, &format!("p{id}")) })
            .collect()
    });
    let out = external_generate(RuleLibrary::standard(), &prompts(5), &addr, Duration::from_secs(2)).unwrap();
    h.join().unwrap();
    assert_eq!(out, vec!["p0", "p1", "", "p3", "p4"]);
}

#[test]
fn responses_are_reordered_by_id() {
    let (addr, h) = stub(100, |reqs| {
        // Answer in reverse with the prompt's own text, so each slot can be checked.
        reqs.iter().rev().map(|(id, text)| reply(*id, text)).collect()
    });
    let batch = prompts(100);
    let out = external_generate(RuleLibrary::standard(), &batch, &addr, Duration::from_secs(5)).unwrap();
    h.join().unwrap();
    let expected: Vec<String> = batch.iter().map(|p| p.render(RuleLibrary::standard())).collect();
    assert_eq!(out, expected);
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let addr = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().to_string()
    };
    assert!(external_generate(RuleLibrary::standard(), &prompts(1), &addr, Duration::from_millis(500)).is_err());
}
