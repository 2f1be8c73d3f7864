fn main() {
    println!("distilforge");
}
