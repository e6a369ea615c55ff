// Revision polling: notify when the journal moved under us, back off
// while the service is unreachable.

export class RevisionPoller {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private known: number;
  private delay: number;

  constructor(
    private fetchRevision: () => Promise<number>,
    private onChange: (revision: number) => void,
    private intervalMs = 1500,
    private maxIntervalMs = 12000,
  ) {
    this.known = -1;
    this.delay = intervalMs;
  }

  start(initialRevision: number): void {
    this.known = initialRevision;
    this.schedule();
  }

  seen(revision: number): void {
    // callers report revisions they learned through their own requests
    this.known = Math.max(this.known, revision);
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private schedule(): void {
    this.stop();
    this.timer = setTimeout(() => void this.tick(), this.delay);
  }

  private async tick(): Promise<void> {
    try {
      const revision = await this.fetchRevision();
      this.delay = this.intervalMs;
      if (revision > this.known) {
        this.known = revision;
        this.onChange(revision);
      }
    } catch {
      this.delay = Math.min(this.delay * 2, this.maxIntervalMs);
    }
    this.schedule();
  }
}
