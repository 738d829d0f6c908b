use mdt_core::xfer::{translate, TranslateOptions};
use mdt_core::Lexicon;

fn demo() -> Lexicon {
    Lexicon::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../lexicons/demo")).unwrap()
}

fn texts(sentence: &str, options: &TranslateOptions) -> Vec<String> {
    translate(sentence, &demo(), "en", "am", options).unwrap().texts
}

#[test]
fn make_fun_of_the_mayor() {
    let lex = demo();
    let opts = TranslateOptions {
        trace: true,
        ..Default::default()
    };
    let r = translate("she made fun of the mayor.", &lex, "en", "am", &opts).unwrap();
    assert_eq!(r.texts, vec!["kantibAwn 'a^sofa^c"]);
    assert_eq!(r.assignments.len(), 1);
    assert_eq!(r.assignments[0].score, (4, -2));
    let trace = r.trace.unwrap();
    assert_eq!(
        trace.transformed,
        "make_v[sb=3psf,tam=prf,tns=pst] fun_n of_prep mayor_n[+def]"
    );
    assert_eq!(
        trace.transfers,
        vec!["<<kantibA_n[+acc,+def]> 'a^sofa_v[sb=3psf,tam=prf]>"]
    );
    assert!(r.outputs[0].iter().all(|s| !s.untranslated && !s.gap));
}

#[test]
fn idiom_with_unaligned_items() {
    assert_eq!(
        texts("one way or the other", &Default::default()),
        vec!["bazihm hona baziyA"]
    );
}

#[test]
fn underspecified_gender_fans_out() {
    assert_eq!(
        texts("John loses hope", &Default::default()),
        vec!["^gon tasfA yqor.tAl", "^gon tasfA tqor.talA^c"]
    );
}

#[test]
fn three_translations_and_cap() {
    assert_eq!(texts("you", &Default::default()), vec!["'anci", "'anta", "'antu"]);
    let one = TranslateOptions {
        max_outputs: Some(1),
        ..Default::default()
    };
    assert_eq!(texts("you", &one), vec!["'anci"]);
}

#[test]
fn negation_reaches_the_verb() {
    let out = texts("they do not know her", &Default::default());
    assert!(out.iter().any(|t| t == "'ersWAn 'ayAwqum"), "{out:?}");
}

#[test]
fn generation_gap_is_marked() {
    // no perfective 3psf row for qora.ta_v
    let r = translate("she lost hope", &demo(), "en", "am", &Default::default()).unwrap();
    assert_eq!(r.texts, vec!["tasfA ⟦qora.ta_v⟧"]);
    assert!(r.outputs[0][1].gap && !r.outputs[0][1].untranslated);
}

#[test]
fn unknown_words_pass_through() {
    let r = translate("John zorbles", &demo(), "en", "am", &Default::default()).unwrap();
    assert_eq!(r.texts, vec!["^gon zorbles"]);
    assert!(r.outputs[0][1].untranslated);
}

#[test]
fn empty_input_is_empty_result() {
    let r = translate("   ", &demo(), "en", "am", &Default::default()).unwrap();
    assert!(r.outputs.is_empty() && r.assignments.is_empty());
}

#[test]
fn wrong_languages_are_errors() {
    assert!(translate("you", &demo(), "fr", "am", &Default::default()).is_err());
    assert!(translate("you", &demo(), "en", "xx", &Default::default()).is_err());
}
