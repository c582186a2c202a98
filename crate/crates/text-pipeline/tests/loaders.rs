use std::fs;

use text_pipeline::corpus::{load_dir, load_trec, load_unlabeled, strip_html};
use text_pipeline::types::Label;

#[test]
fn loads_directory_layout_in_sorted_order() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("ham")).unwrap();
    fs::create_dir_all(dir.path().join("spam")).unwrap();
    fs::write(dir.path().join("ham/b.txt"), "Subject: standup\nsee you monday").unwrap();
    fs::write(dir.path().join("ham/a.txt"), "plain body only").unwrap();
    fs::write(dir.path().join("spam/z.txt"), "Subject: WIN\n<b>free</b> money").unwrap();

    let emails = load_dir(dir.path()).unwrap();
    assert_eq!(emails.len(), 3);
    assert_eq!(emails[0].id, "ham/a.txt");
    assert_eq!(emails[0].label, Some(Label::Ham));
    assert_eq!(emails[0].subject, "");
    assert_eq!(emails[1].id, "ham/b.txt");
    assert_eq!(emails[1].subject, "standup");
    assert_eq!(emails[1].body.trim(), "see you monday");
    assert_eq!(emails[2].label, Some(Label::Spam));
    assert!(emails[2].body.contains("free"));
    assert!(!emails[2].body.contains('<'));
}

#[test]
fn loads_trec_index_layout() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("full")).unwrap();
    fs::create_dir_all(dir.path().join("data")).unwrap();
    fs::write(dir.path().join("data/inmail.1"), "Subject: hi\nhello there").unwrap();
    fs::write(dir.path().join("data/inmail.2"), "Subject: $$$\nbuy now").unwrap();
    fs::write(dir.path().join("full/index"), "ham ../data/inmail.1\nspam ../data/inmail.2\n")
        .unwrap();

    let emails = load_trec(dir.path()).unwrap();
    assert_eq!(emails.len(), 2);
    assert_eq!(emails[0].label, Some(Label::Ham));
    assert_eq!(emails[0].subject, "hi");
    assert_eq!(emails[1].label, Some(Label::Spam));
    assert_eq!(emails[1].body.trim(), "buy now");
}

#[test]
fn trec_index_with_bad_label_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("full")).unwrap();
    fs::write(dir.path().join("full/index"), "virus ../data/inmail.1\n").unwrap();
    assert!(load_trec(dir.path()).is_err());
}

#[test]
fn unlabeled_loader_reads_single_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("incoming.txt");
    fs::write(&path, "Subject: question\nwhat time works").unwrap();
    let email = load_unlabeled(&path).unwrap();
    assert_eq!(email.label, None);
    assert_eq!(email.subject, "question");
}

#[test]
fn html_stripping_removes_markup_and_scripts() {
    let html = "<html><head><style>body { color: red }</style>\
                <script>alert('x')</script></head>\
                <body><p>Buy <b>now</b> &amp; save</p></body></html>";
    let text = strip_html(html);
    assert!(!text.contains('<'));
    assert!(!text.contains("alert"));
    assert!(!text.contains("color"));
    assert!(text.contains("Buy"));
    assert!(text.contains("now"));
    assert!(text.contains('&'));
}
