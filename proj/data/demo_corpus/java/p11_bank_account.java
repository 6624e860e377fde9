public class Main {
  static class Account {
    private long balance;
    private final String owner;

    Account(String owner, long initial) {
      this.owner = owner;
      this.balance = initial;
    }

    boolean withdraw(long amount) {
      if (amount > balance) {
        return false;
      }
      balance -= amount;
      return true;
    }

    void deposit(long amount) {
      balance += amount;
    }

    long getBalance() {
      return balance;
    }
  }

  public static void main(String[] args) {
    Account acct = new Account("ann", 100);
    acct.deposit(50);
    boolean ok = acct.withdraw(120);
    System.out.println(ok + " " + acct.getBalance());
  }
}
